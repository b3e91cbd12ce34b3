# -*- coding: utf-8 -*-

"""Werttypen der Kreuzungsumgebung: Agenten, Weltzustand, Schrittergebnis."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import StateError

Array = NDArray[np.float64]
Kind = Literal["robot", "human", "static"]
HumanPolicy = Literal["orca", "sf"]

SPEED_TOL = 1e-9


class Done(str, enum.Enum):
    SUCCESS = "success"
    COLLISION = "collision"
    TIMEOUT = "timeout"


def _vec(value: ArrayLike) -> Array:
    arr = np.array(value, dtype=np.float64).reshape(2)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AgentState:
    """
    Ein Agent der Szene. Statische Hindernisse sind Fußgänger mit v_pref = 0.

    `g` und `v_pref` sind für Fußgänger privat und erscheinen nicht in der
    Beobachtung des Roboters.
    """

    p: Array
    v: Array
    rho: float
    g: Array
    v_pref: float
    kind: Kind = "human"
    policy: HumanPolicy | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _vec(self.p))
        object.__setattr__(self, "v", _vec(self.v))
        object.__setattr__(self, "g", _vec(self.g))
        if self.rho <= 0:
            raise StateError(f"Radius muss positiv sein, ist {self.rho}")
        if self.kind == "static":
            if self.v_pref != 0 or np.any(self.v != 0):
                raise StateError("statische Hindernisse haben v = 0 und v_pref = 0")
        elif self.v_pref <= 0:
            raise StateError(f"v_pref muss positiv sein, ist {self.v_pref}")
        if float(np.linalg.norm(self.v)) > self.v_pref + SPEED_TOL:
            raise StateError(f"‖v‖ = {np.linalg.norm(self.v):.6f} überschreitet v_pref = {self.v_pref}")

    @property
    def is_static(self) -> bool:
        return self.kind == "static"

    def moved(self, p: ArrayLike, v: ArrayLike) -> "AgentState":
        return replace(self, p=p, v=v)

    def public(self) -> Array:
        """s^ho = [p_x, p_y, v_x, v_y, ρ]."""
        return np.array([*self.p, *self.v, self.rho])

    def full(self) -> Array:
        """s^r = [p_x, p_y, v_x, v_y, ρ, g_x, g_y, v_pref]."""
        return np.array([*self.p, *self.v, self.rho, *self.g, self.v_pref])


@dataclass(frozen=True)
class Observation:
    """o = [s^r, s^ho…]: Roboter [8], sichtbare Fußgänger [N, 5]."""

    robot: Array
    humans: Array

    @property
    def n_humans(self) -> int:
        return self.humans.shape[0]


@dataclass(frozen=True)
class WorldState:
    robot: AgentState
    humans: tuple[AgentState, ...]
    t: float
    T_step: float
    seed: int
    step_count: int = 0
    done: Done | None = None

    def __post_init__(self) -> None:
        if self.t < 0:
            raise StateError("t muss ≥ 0 sein")

    @property
    def moving_humans(self) -> tuple[AgentState, ...]:
        return tuple(h for h in self.humans if not h.is_static)

    def observation(self) -> Observation:
        humans = np.array([h.public() for h in self.humans]).reshape(len(self.humans), 5)
        return Observation(robot=self.robot.full(), humans=humans)

    def surface_distances(self) -> Array:
        """Abstand Roboteroberfläche zu jeder Fußgängeroberfläche."""
        if not self.humans:
            return np.zeros(0)
        centres = np.array([h.p for h in self.humans])
        radii = np.array([h.rho for h in self.humans])
        return np.linalg.norm(centres - self.robot.p, axis=1) - radii - self.robot.rho

    def min_separation(self) -> float:
        gaps = self.surface_distances()
        return float(gaps.min()) if gaps.size else float("inf")

    def goal_distance(self) -> float:
        return float(np.linalg.norm(self.robot.p - self.robot.g))


@dataclass(frozen=True)
class StepOutcome:
    observation: Observation
    reward: float
    done: Done | None
    min_separation: float
    reward_terms: dict[str, float] = field(default_factory=dict)
    clipped: bool = False
