# -*- coding: utf-8 -*-

"""Gymnasium-Hülle um `CrowdSim` mit Box-Aktions- und Beobachtungsräumen."""

from __future__ import annotations

from typing import Any

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from ..config import EnvConfig
from .crowd import CrowdSim, RewardFunction
from .state import Observation, WorldState

MAX_HUMANS = 25


def flatten_observation(obs: Observation, max_humans: int = MAX_HUMANS) -> np.ndarray:
    """[s^r (8), s^ho (5) je Fußgänger, mit Nullen auf `max_humans` aufgefüllt]."""
    humans = np.zeros((max_humans, 5))
    humans[: obs.n_humans] = obs.humans[:max_humans]
    return np.concatenate([obs.robot, humans.reshape(-1)]).astype(np.float32)


class CrowdNavEnv(gym.Env):
    """Kreisszenario als Gymnasium-Umgebung; Aktion ist die Robotergeschwindigkeit."""

    metadata = {"render_modes": []}

    def __init__(self, config: EnvConfig = EnvConfig(), reward: RewardFunction | None = None):
        super().__init__()
        self.sim = CrowdSim(config, reward)
        v = config.robot_v_pref
        self.action_space = spaces.Box(low=-v, high=v, shape=(2,), dtype=np.float32)
        self.observation_space = spaces.Box(low=-np.inf, high=np.inf, shape=(8 + 5 * MAX_HUMANS,), dtype=np.float32)
        self.state: WorldState | None = None

    def reset(self, *, seed: int | None = None, options: dict[str, Any] | None = None):
        super().reset(seed=seed)
        episode_seed = int(self.np_random.integers(2**31)) if seed is None else seed
        self.state, obs = self.sim.reset(episode_seed)
        return flatten_observation(obs), {"seed": episode_seed}

    def step(self, action):
        if self.state is None:
            raise RuntimeError("reset() muss vor step() aufgerufen werden")
        outcome, self.state = self.sim.step(self.state, np.asarray(action, dtype=np.float64))
        terminated = outcome.done is not None and outcome.done.value != "timeout"
        truncated = outcome.done is not None and outcome.done.value == "timeout"
        info = {
            "done": outcome.done.value if outcome.done else None,
            "min_separation": outcome.min_separation,
            "reward_terms": outcome.reward_terms,
        }
        return flatten_observation(outcome.observation), outcome.reward, terminated, truncated, info
