"""Auswertung, Energiebilanz und Trajektoriengrafik."""

from .audit import AuditRow, TraceStep, audit_lines, energy_audit, energy_trace
from .metrics import SOCIAL_SCORE_LABEL, EpisodeRecord, EvalReport, evaluate, social_score, social_score_terms
from .render import TrajectoryScene, build_scene, render_scene, render_trajectory

__all__ = [
    "SOCIAL_SCORE_LABEL",
    "AuditRow",
    "EpisodeRecord",
    "EvalReport",
    "TraceStep",
    "TrajectoryScene",
    "audit_lines",
    "build_scene",
    "energy_audit",
    "energy_trace",
    "evaluate",
    "render_scene",
    "render_trajectory",
    "social_score",
    "social_score_terms",
]
