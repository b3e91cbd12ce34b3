"""Kreuzungsumgebung mit ORCA- und Social-Force-Fußgängern."""

from .crowd import CrowdSim, RewardFunction, SocialReward, StepEvents, clip_speed
from .orca import Line, OrcaResult, orca_line, orca_velocity, solve_orca
from .social_force import SocialForceParams, social_force
from .state import AgentState, Done, Observation, StepOutcome, WorldState
from .trajectory import Trajectory, parse_trajectory, read_trajectory, write_trajectory

__all__ = [
    "AgentState",
    "CrowdSim",
    "Done",
    "Line",
    "Observation",
    "OrcaResult",
    "RewardFunction",
    "SocialForceParams",
    "SocialReward",
    "StepEvents",
    "StepOutcome",
    "Trajectory",
    "WorldState",
    "clip_speed",
    "orca_line",
    "orca_velocity",
    "parse_trajectory",
    "read_trajectory",
    "social_force",
    "solve_orca",
    "write_trajectory",
]
