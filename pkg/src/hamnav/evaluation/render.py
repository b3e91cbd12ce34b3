# -*- coding: utf-8 -*-

"""
Trajektorien als SVG.

`build_scene` zerlegt eine Trajektorie in Zeichenelemente (Pfadsegmente mit
zeitlich ansteigender Deckkraft, Radiuskreise im letzten Schritt,
Zielmarken); `render_scene` zeichnet sie mit matplotlib. Gleiche Eingabe
ergibt byte-identische Dateien.
"""

# --- 1. Importe ---
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle, Rectangle  # noqa: E402

from ..env.trajectory import Trajectory, read_trajectory  # noqa: E402

KIND_COLORS = {"robot": "#d62728", "static": "#555555"}
HUMAN_COLORS = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#bcbd22"]
MIN_ALPHA = 0.15
MOVE_TOL = 1e-9
SVG_RC = {"svg.hashsalt": "hamnav", "svg.fonttype": "none"}


# --- 2. Szene ---
@dataclass(frozen=True)
class Segment:
    agent_id: int
    start: tuple[float, float]
    end: tuple[float, float]
    alpha: float
    color: str


@dataclass(frozen=True)
class AgentCircle:
    agent_id: int
    centre: tuple[float, float]
    radius: float
    color: str


@dataclass
class TrajectoryScene:
    arena_size: float
    segments: list[Segment] = field(default_factory=list)
    circles: list[AgentCircle] = field(default_factory=list)
    goals: list[tuple[int, tuple[float, float], str]] = field(default_factory=list)

    def paths(self) -> dict[int, list[Segment]]:
        out: dict[int, list[Segment]] = {}
        for seg in self.segments:
            out.setdefault(seg.agent_id, []).append(seg)
        return out


def _color(agent_id: int, kind: str) -> str:
    return KIND_COLORS.get(kind) or HUMAN_COLORS[(agent_id - 1) % len(HUMAN_COLORS)]


def build_scene(trajectory: Trajectory, arena_size: float = 20.0) -> TrajectoryScene:
    scene = TrajectoryScene(arena_size=arena_size)
    for agent_id, track in trajectory.tracks.items():
        color = _color(agent_id, track.kind)
        pos = track.positions
        count = len(pos) - 1
        for k in range(count):
            a, b = pos[k], pos[k + 1]
            if max(abs(b[0] - a[0]), abs(b[1] - a[1])) <= MOVE_TOL:
                continue
            alpha = MIN_ALPHA + (1.0 - MIN_ALPHA) * (k + 1) / count
            scene.segments.append(Segment(agent_id, (float(a[0]), float(a[1])), (float(b[0]), float(b[1])), alpha, color))
        if len(pos):
            scene.circles.append(AgentCircle(agent_id, (float(pos[-1][0]), float(pos[-1][1])), track.radius, color))
        if agent_id in trajectory.goals:
            scene.goals.append((agent_id, trajectory.goals[agent_id], color))
    return scene


# --- 3. Zeichnen ---
def render_scene(scene: TrajectoryScene, out: str | Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    half = scene.arena_size / 2.0
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        try:
            ax.add_patch(Rectangle((-half, -half), scene.arena_size, scene.arena_size, fill=False, edgecolor="black", lw=1.0))
            for seg in scene.segments:
                ax.plot([seg.start[0], seg.end[0]], [seg.start[1], seg.end[1]], color=seg.color, alpha=seg.alpha, lw=1.5)
            for circle in scene.circles:
                ax.add_patch(Circle(circle.centre, circle.radius, fill=False, edgecolor=circle.color, lw=1.2))
            for _, (gx, gy), color in scene.goals:
                ax.plot([gx], [gy], marker="*", markersize=10, color=color, linestyle="none")
            ax.set_xlim(-half - 0.5, half + 0.5)
            ax.set_ylim(-half - 0.5, half + 0.5)
            ax.set_aspect("equal")
            ax.set_xlabel("x [m]")
            ax.set_ylabel("y [m]")
            fig.savefig(out, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return out


def render_trajectory(path: str | Path, out: str | Path, arena_size: float = 20.0) -> Path:
    """Liest eine Trajektoriendatei und schreibt die SVG-Grafik nach `out`."""
    return render_scene(build_scene(read_trajectory(path), arena_size), out)
