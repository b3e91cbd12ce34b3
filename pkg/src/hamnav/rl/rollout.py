# -*- coding: utf-8 -*-

"""
Episoden ausrollen, einzeln oder parallel.

Jede Episode bekommt ihren Seed vorab aus einer `SeedSequence`; die Ergebnisse
hängen damit nicht von der Reihenfolge ab, in der die Worker fertig werden.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from ..env.crowd import CrowdSim
from .buffer import Episode, Transition
from .policy import Mode, RobotPolicy

# zweiter Zufallsstrom je Episode, getrennt vom Umgebungsrauschen
POLICY_STREAM = 1


def episode_seeds(seed: int, count: int) -> list[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


def run_episode(sim: CrowdSim, policy: RobotPolicy, seed: int, mode: Mode = "eval") -> Episode:
    state, _ = sim.reset(seed)
    rng = np.random.default_rng([seed, POLICY_STREAM])
    episode = Episode(seed=seed, states=[state])
    while state.done is None:
        record = policy.act(episode.states, rng, mode)
        outcome, state = sim.step(episode.states[-1], record.action)
        if mode == "train" and record.raw is not None:
            episode.transitions.append(
                Transition(
                    state=episode.states[-1],
                    window=record.window,
                    condition=record.condition,
                    noise_seed=record.noise_seed,
                    raw_action=record.raw,
                    log_prob=record.log_prob,
                )
            )
        episode.states.append(state)
        episode.rewards.append(outcome.reward)
        episode.min_separations.append(outcome.min_separation)
        episode.clipped_steps += int(outcome.clipped)
    episode.done = state.done
    return episode


def collect_episodes(
    sim: CrowdSim,
    policy: RobotPolicy,
    seeds: Sequence[int],
    mode: Mode = "eval",
    workers: int = 1,
) -> list[Episode]:
    """Rollt `seeds` aus; Rückgabe in Seed-Reihenfolge. `policy` wird nur gelesen."""
    if workers <= 1 or len(seeds) <= 1:
        return [run_episode(sim, policy, s, mode) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run_episode(sim, policy, s, mode), seeds))
