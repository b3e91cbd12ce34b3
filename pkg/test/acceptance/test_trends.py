"""Lange Akzeptanzläufe; nur mit `pytest -m slow`."""

import numpy as np
import pytest

from hamnav.config import EnvConfig, load_settings
from hamnav.env.crowd import CrowdSim
from hamnav.evaluation.audit import energy_audit, energy_trace
from hamnav.evaluation.metrics import evaluate
from hamnav.rl.baselines import OrcaRobot
from hamnav.rl.policy import HamiltonianPolicy
from hamnav.rl.rollout import episode_seeds, run_episode
from hamnav.rl.train import train

pytestmark = pytest.mark.slow


def test_learning_improves_return_in_empty_world():
    settings = load_settings(
        env={"n_humans": 0, "time_limit": 25.0},
        encoder={"d_model": 16, "n_heads": 2, "window": 2, "head_hidden": 16, "energy_width": 8},
        diffusion={"K": 20, "kappa": 3, "T_candidates": 4, "eps_hidden": 16},
        train={"total_episodes": 300, "episodes_per_update": 10, "workers": 4},
    )

    result = train(settings)

    returns = [m.mean_return for m in result.metrics]
    first, last = np.mean(returns[:5]), np.mean(returns[-5:])
    assert last >= first + 0.5 * abs(first)


def test_orca_success_does_not_rise_with_crowd_size():
    rates = []
    for n in (5, 10, 15):
        config = EnvConfig(n_humans=n)
        rates.append(evaluate(OrcaRobot(config), config, n_runs=500, seed=0, workers=4).success_rate)

    assert rates[1] <= rates[0] + 2.0
    assert rates[2] <= rates[1] + 2.0
    assert rates[2] <= rates[0]


def test_trained_policy_beats_invisible_orca_robot():
    settings = load_settings(train={"total_episodes": 2000, "workers": 4})
    config = settings.env

    trained = train(settings).policy
    learned = evaluate(trained, config, n_runs=500, seed=123, workers=4)
    orca = evaluate(OrcaRobot(config), config, n_runs=500, seed=123, workers=4)

    assert learned.success_rate >= orca.success_rate + 20.0


def test_energy_audit_over_crowd_episodes(small_settings):
    policy = HamiltonianPolicy(small_settings)
    sim = CrowdSim(small_settings.env)

    violations = 0
    for seed in episode_seeds(0, 100):
        rows = energy_audit(energy_trace(policy, run_episode(sim, policy, seed).states))
        violations += sum(r.violation for r in rows)

    assert violations == 0
