# -*- coding: utf-8 -*-

"""Episodenspeicher für On-Policy-Updates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from ..encoder import ObservationWindow
from ..env.state import Done, WorldState
from .ppo import gae


@dataclass(frozen=True)
class Transition:
    """Ein Trainingsschritt, aufgezeichnet unter der sammelnden Momentaufnahme."""

    state: WorldState
    window: ObservationWindow
    condition: np.ndarray
    noise_seed: int
    raw_action: np.ndarray
    log_prob: float


@dataclass
class Episode:
    seed: int
    states: list[WorldState] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    min_separations: list[float] = field(default_factory=list)
    # nur im Trainingsmodus der gelernten Policy gefüllt
    transitions: list[Transition] = field(default_factory=list)
    done: Done | None = None
    clipped_steps: int = 0

    @property
    def total_reward(self) -> float:
        return float(np.sum(self.rewards))

    @property
    def final_state(self) -> WorldState:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.rewards)


@dataclass
class Batch:
    """Flache Sicht auf alle Übergänge eines Updates, mit Vorteilen und Zielen."""

    transitions: list[Transition]
    advantages: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return len(self.transitions)

    def minibatches(self, size: int, rng: np.random.Generator) -> Iterator["Batch"]:
        order = rng.permutation(len(self))
        for start in range(0, len(self), size):
            idx = order[start : start + size]
            yield Batch([self.transitions[i] for i in idx], self.advantages[idx], self.returns[idx])

    @property
    def windows(self) -> list[ObservationWindow]:
        return [t.window for t in self.transitions]

    @property
    def conditions(self) -> np.ndarray:
        return np.stack([t.condition for t in self.transitions])

    @property
    def noise_seeds(self) -> list[int]:
        return [t.noise_seed for t in self.transitions]

    @property
    def actions(self) -> np.ndarray:
        return np.stack([t.raw_action for t in self.transitions])

    @property
    def old_log_probs(self) -> np.ndarray:
        return np.array([t.log_prob for t in self.transitions])

    @property
    def states(self) -> list[WorldState]:
        return [t.state for t in self.transitions]


@dataclass
class RolloutBuffer:
    """Episoden eines Updates in Sammelreihenfolge; ein Schreiber."""

    episodes: list[Episode] = field(default_factory=list)

    def add(self, episode: Episode) -> None:
        self.episodes.append(episode)

    def extend(self, episodes: Iterable[Episode]) -> None:
        self.episodes.extend(episodes)

    @property
    def n_steps(self) -> int:
        return sum(len(e.transitions) for e in self.episodes)

    @property
    def boundaries(self) -> list[int]:
        """Startindex jeder Episode im flachen Batch."""
        return [0, *np.cumsum([len(e.transitions) for e in self.episodes])[:-1].tolist()] if self.episodes else []

    def to_batch(
        self,
        value_fn: Callable[[list[WorldState]], np.ndarray],
        gamma: float,
        lam: float,
    ) -> Batch:
        """
        Vorteile und Wertziele je Episode per GAE, danach aneinandergehängt.

        Nach Erfolg oder Kollision ist der Folgewert 0, bei Zeitüberschreitung
        wird mit V(letzter Zustand) gebootstrappt.
        """
        transitions: list[Transition] = []
        advantages: list[np.ndarray] = []
        returns: list[np.ndarray] = []
        for episode in self.episodes:
            if not episode.transitions:
                continue
            values = value_fn([t.state for t in episode.transitions])
            terminal = episode.done in (Done.SUCCESS, Done.COLLISION)
            bootstrap = 0.0 if terminal else float(value_fn([episode.final_state])[0])
            dones = np.zeros(len(episode.transitions), dtype=bool)
            dones[-1] = terminal
            adv, ret = gae(episode.rewards[: len(values)], values, bootstrap, gamma, lam, dones)
            transitions.extend(episode.transitions)
            advantages.append(adv)
            returns.append(ret)
        if not transitions:
            return Batch([], np.zeros(0), np.zeros(0))
        return Batch(transitions, np.concatenate(advantages), np.concatenate(returns))
