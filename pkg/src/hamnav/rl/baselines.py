# -*- coding: utf-8 -*-

"""Regelbasierte Roboterpolicies als Vergleich für die gelernte Policy."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..config import EnvConfig
from ..env.orca import orca_velocity, preferred_velocity
from ..env.social_force import SocialForceParams, advance_velocity, social_force
from ..env.state import WorldState
from .policy import ActionRecord, Mode


class _Baseline:
    name = "baseline"

    def __init__(self, config: EnvConfig = EnvConfig()):
        self.config = config

    def check_compatible(self, env: EnvConfig) -> None:
        return None


class OrcaRobot(_Baseline):
    """Der Roboter weicht wie ein ORCA-Fußgänger aus (sieht alle Fußgänger)."""

    name = "orca"

    def act(self, history: Sequence[WorldState], rng: np.random.Generator, mode: Mode = "eval") -> ActionRecord:
        state = history[-1]
        cfg = self.config
        result = orca_velocity(
            state.robot,
            list(state.humans),
            cfg.orca_horizon,
            state.T_step,
            horizon_static=cfg.orca_horizon_static,
            neighbor_dist=cfg.orca_neighbor_dist,
            max_neighbors=cfg.orca_max_neighbors,
            margin=cfg.orca_safety_margin,
        )
        return ActionRecord(action=result.velocity)


class SocialForceRobot(_Baseline):
    name = "sf"

    def act(self, history: Sequence[WorldState], rng: np.random.Generator, mode: Mode = "eval") -> ActionRecord:
        state = history[-1]
        cfg = self.config
        params = SocialForceParams(cfg.sf_tau, cfg.sf_a, cfg.sf_b, cfg.sf_force_max)
        acc = social_force(state.robot, list(state.humans), params=params, rng=rng)
        return ActionRecord(action=advance_velocity(state.robot, acc, state.T_step))


class StraightLineRobot(_Baseline):
    """Fährt ohne Rücksicht geradeaus zum Ziel."""

    name = "straight"

    def act(self, history: Sequence[WorldState], rng: np.random.Generator, mode: Mode = "eval") -> ActionRecord:
        state = history[-1]
        return ActionRecord(action=preferred_velocity(state.robot, state.T_step))


class ZeroRobot(_Baseline):
    name = "zero"

    def act(self, history: Sequence[WorldState], rng: np.random.Generator, mode: Mode = "eval") -> ActionRecord:
        return ActionRecord(action=np.zeros(2))


BASELINES = {cls.name: cls for cls in (OrcaRobot, SocialForceRobot, StraightLineRobot, ZeroRobot)}
