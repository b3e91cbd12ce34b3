# -*- coding: utf-8 -*-

"""
Die Kreuzungsumgebung: Szenarioerzeugung, Schritt, Belohnung, Abbruch.

`CrowdSim` ist zustandslos bis auf seine Konfiguration; `reset` und `step`
arbeiten auf unveränderlichen `WorldState`-Werten. Zufall pro Schritt wird
aus (seed, Schrittzähler) abgeleitet, eine Episode ist damit durch
(seed, Aktionen, Konfiguration) vollständig bestimmt.

Der Roboter ist für die Fußgänger unsichtbar: ihre Nachbarlisten enthalten
ihn nie (außer `EnvConfig.robot_visible` ist gesetzt).
"""

# --- 1. Importe ---
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike

from ..config import EnvConfig, RewardConfig
from ..errors import EpisodeDoneError, ScenarioError
from .orca import orca_velocity
from .social_force import SocialForceParams, advance_velocity, social_force
from .state import AgentState, Done, Observation, StepOutcome, WorldState

logger = logging.getLogger(__name__)

CLIP_TOL = 1e-9


# --- 2. Belohnung ---
@dataclass(frozen=True)
class StepEvents:
    done: Done | None
    min_separation: float
    prev_goal_distance: float
    goal_distance: float


class RewardFunction(Protocol):
    """Belohnungsschnittstelle; hier lässt sich ein gelerntes Belohnungsmodell einsetzen."""

    def __call__(self, prev: WorldState, action: np.ndarray, events: StepEvents) -> tuple[float, dict[str, float]]: ...


@dataclass(frozen=True)
class SocialReward:
    """
    Erfolg +10, Kollision −20, Unbehagen −0.5·(d_soc − d_min)/d_soc bei
    d_min < d_soc, Fortschritt +2·Δ(Zielabstand), −0.01 je nicht-terminalem Schritt.
    """

    config: RewardConfig = RewardConfig()

    def __call__(self, prev: WorldState, action: np.ndarray, events: StepEvents) -> tuple[float, dict[str, float]]:
        cfg = self.config
        terms = {"success": 0.0, "collision": 0.0, "discomfort": 0.0, "progress": 0.0, "step": 0.0}
        terms["progress"] = cfg.progress * (events.prev_goal_distance - events.goal_distance)
        if events.done is Done.SUCCESS:
            terms["success"] = cfg.success
        elif events.done is Done.COLLISION:
            terms["collision"] = cfg.collision
        else:
            terms["step"] = -cfg.step_penalty
        d_min, d_soc = events.min_separation, cfg.social_distance
        if events.done is not Done.COLLISION and 0.0 <= d_min < d_soc:
            terms["discomfort"] = -cfg.discomfort_scale * (d_soc - d_min) / d_soc
        return float(sum(terms.values())), terms


# --- 3. Hilfsfunktionen ---
def clip_speed(v: ArrayLike, limit: float) -> tuple[np.ndarray, bool]:
    v = np.asarray(v, dtype=np.float64).reshape(2)
    speed = float(np.linalg.norm(v))
    if speed > limit:
        return v * (limit / speed), speed > limit + CLIP_TOL
    return v, False


def _overlaps(p: np.ndarray, rho: float, placed: list[tuple[np.ndarray, float]], margin: float = 0.0) -> bool:
    return any(float(np.linalg.norm(p - q)) < rho + r + margin for q, r in placed)


# --- 4. Simulator ---
class CrowdSim:
    """Kreissszenario in einer quadratischen Arena mit ORCA-/SF-Fußgängern."""

    def __init__(self, config: EnvConfig = EnvConfig(), reward: RewardFunction | None = None):
        self.config = config
        self.reward = reward or SocialReward()
        self.sf_params = SocialForceParams(config.sf_tau, config.sf_a, config.sf_b, config.sf_force_max)

    # --- Szenario ---
    def reset(self, seed: int) -> tuple[WorldState, Observation]:
        """Platziert Roboter, Fußgänger und statische Hindernisse; deterministisch in `seed`."""
        cfg = self.config
        rng = np.random.default_rng(seed)
        R = cfg.circle_radius
        robot = AgentState(p=(0.0, -R), v=(0.0, 0.0), rho=cfg.robot_radius, g=(0.0, R), v_pref=cfg.robot_v_pref, kind="robot")
        placed: list[tuple[np.ndarray, float]] = [(robot.p, robot.rho)]
        attempts = 0

        humans: list[AgentState] = []
        for i in range(cfg.n_humans):
            base = 2.0 * math.pi * i / cfg.n_humans
            while True:
                attempts += 1
                if attempts > cfg.max_placement_attempts:
                    raise ScenarioError(f"Platzierung nach {cfg.max_placement_attempts} Versuchen gescheitert")
                angle = base + (rng.uniform(-cfg.angle_jitter, cfg.angle_jitter) if cfg.angle_jitter > 0 else 0.0)
                p = R * np.array([math.cos(angle), math.sin(angle)])
                if not _overlaps(p, cfg.human_radius, placed):
                    break
            policy = cfg.ped_policy if cfg.ped_policy != "mixed" else ("orca" if rng.random() < 0.5 else "sf")
            humans.append(AgentState(p=p, v=(0.0, 0.0), rho=cfg.human_radius, g=-p, v_pref=cfg.human_v_pref, policy=policy))
            placed.append((p, cfg.human_radius))

        for _ in range(cfg.n_static):
            while True:
                attempts += 1
                if attempts > cfg.max_placement_attempts:
                    raise ScenarioError(f"Platzierung nach {cfg.max_placement_attempts} Versuchen gescheitert")
                radius = (R - 2.0) * math.sqrt(rng.uniform())
                angle = rng.uniform(0.0, 2.0 * math.pi)
                p = radius * np.array([math.cos(angle), math.sin(angle)])
                clear_goal = float(np.linalg.norm(p - robot.g)) > cfg.robot_radius + cfg.human_radius + 0.5
                if clear_goal and not _overlaps(p, cfg.human_radius, placed, margin=0.2):
                    break
            humans.append(AgentState(p=p, v=(0.0, 0.0), rho=cfg.human_radius, g=p, v_pref=0.0, kind="static"))
            placed.append((p, cfg.human_radius))

        state = WorldState(robot=robot, humans=tuple(humans), t=0.0, T_step=cfg.dt, seed=seed)
        return state, state.observation()

    # --- Fußgänger ---
    def _neighbors(self, state: WorldState, index: int) -> list[AgentState]:
        others = [h for j, h in enumerate(state.humans) if j != index]
        if self.config.robot_visible:
            others.append(state.robot)
        return others

    def human_velocity(self, state: WorldState, index: int, rng: np.random.Generator) -> np.ndarray:
        cfg = self.config
        human = state.humans[index]
        if human.is_static:
            return np.zeros(2)
        neighbors = self._neighbors(state, index)
        if human.policy == "sf":
            acc = social_force(human, neighbors, params=self.sf_params, rng=rng)
            return advance_velocity(human, acc, state.T_step)
        result = orca_velocity(
            human,
            neighbors,
            cfg.orca_horizon,
            state.T_step,
            horizon_static=cfg.orca_horizon_static,
            neighbor_dist=cfg.orca_neighbor_dist,
            max_neighbors=cfg.orca_max_neighbors,
            margin=cfg.orca_safety_margin,
        )
        return clip_speed(result.velocity, human.v_pref)[0]

    # --- Schritt ---
    def step(self, state: WorldState, robot_action: ArrayLike) -> tuple[StepOutcome, WorldState]:
        """Ein Euler-Schritt aller Agenten; Kollision vor Erfolg vor Zeitüberschreitung."""
        if state.done is not None:
            raise EpisodeDoneError(f"Episode bereits beendet ({state.done.value})")
        cfg = self.config
        action, clipped = clip_speed(robot_action, state.robot.v_pref)
        if clipped:
            logger.warning("Roboteraktion auf v_pref=%.2f gekappt (‖a‖=%.3f)", state.robot.v_pref, float(np.linalg.norm(robot_action)))
        rng = np.random.default_rng([state.seed, state.step_count])

        velocities = [self.human_velocity(state, i, rng) for i in range(len(state.humans))]
        if cfg.sigma_env > 0:
            action = clip_speed(action + rng.normal(0.0, cfg.sigma_env, 2), state.robot.v_pref)[0]
            velocities = [
                v if h.is_static else clip_speed(v + rng.normal(0.0, cfg.sigma_env, 2), h.v_pref)[0]
                for v, h in zip(velocities, state.humans)
            ]

        dt = state.T_step
        robot = state.robot.moved(state.robot.p + action * dt, action)
        humans = tuple(h.moved(h.p + v * dt, v) for h, v in zip(state.humans, velocities))
        step_count = state.step_count + 1
        moved = replace(state, robot=robot, humans=humans, t=step_count * dt, step_count=step_count)

        min_sep = moved.min_separation()
        if min_sep < 0.0:
            done = Done.COLLISION
        elif moved.goal_distance() < robot.rho:
            done = Done.SUCCESS
        elif moved.t > cfg.time_limit:
            done = Done.TIMEOUT
        else:
            done = None
        events = StepEvents(done, min_sep, state.goal_distance(), moved.goal_distance())
        reward, terms = self.reward(state, action, events)
        final = replace(moved, done=done)
        outcome = StepOutcome(
            observation=final.observation(),
            reward=reward,
            done=done,
            min_separation=min_sep,
            reward_terms=terms,
            clipped=clipped,
        )
        return outcome, final
