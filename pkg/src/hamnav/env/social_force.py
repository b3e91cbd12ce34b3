# -*- coding: utf-8 -*-

"""
Social-Force-Modell für Fußgänger.

Beschleunigung = Antrieb (v_pref·ê_Ziel − v)/τ plus paarweise Abstoßung
A·exp((ρ_i + ρ_j − d_ij)/B)·n̂_ij (Einheitsmasse, Beschleunigungseinheiten).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state import AgentState

Array = np.ndarray


@dataclass(frozen=True)
class SocialForceParams:
    tau: float = 0.5
    A: float = 2.0
    B: float = 0.08
    force_max: float = 10.0


def repulsion(agent: AgentState, other: AgentState, params: SocialForceParams, rng: np.random.Generator | None = None) -> Array:
    offset = agent.p - other.p
    d = float(np.linalg.norm(offset))
    if d == 0.0:
        # deckungsgleich: gekappte Kraft in zufälliger Richtung
        rng = rng or np.random.default_rng(0)
        angle = rng.uniform(0.0, 2.0 * np.pi)
        return params.force_max * np.array([np.cos(angle), np.sin(angle)])
    magnitude = params.A * np.exp((agent.rho + other.rho - d) / params.B)
    return magnitude * offset / d


def social_force(
    agent: AgentState,
    neighbors: Sequence[AgentState],
    goal: Array | None = None,
    params: SocialForceParams = SocialForceParams(),
    rng: np.random.Generator | None = None,
) -> Array:
    """Beschleunigung auf `agent`; am Ziel entfällt der Antrieb in Zielrichtung."""
    goal = agent.g if goal is None else np.asarray(goal, float)
    to_goal = goal - agent.p
    dist = float(np.linalg.norm(to_goal))
    desired = agent.v_pref * to_goal / dist if dist > 1e-12 else np.zeros(2)
    force = (desired - agent.v) / params.tau
    for other in neighbors:
        force = force + repulsion(agent, other, params, rng)
    return force


def advance_velocity(agent: AgentState, acceleration: Array, T_step: float) -> Array:
    """v + a·T, auf v_pref gekappt."""
    v = agent.v + np.asarray(acceleration) * T_step
    speed = float(np.linalg.norm(v))
    if speed > agent.v_pref:
        v = v * (agent.v_pref / speed)
    return v
