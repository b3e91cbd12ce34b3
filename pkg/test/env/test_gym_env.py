import numpy as np
import pytest

from hamnav.config import EnvConfig
from hamnav.env.gym_env import MAX_HUMANS, CrowdNavEnv, flatten_observation


def test_reset_returns_padded_observation():
    env = CrowdNavEnv(EnvConfig(n_humans=3))

    obs, info = env.reset(seed=7)

    assert obs.shape == (8 + 5 * MAX_HUMANS,)
    assert obs.dtype == np.float32
    assert env.observation_space.contains(obs)
    assert info == {"seed": 7}
    assert np.all(obs[8 + 5 * 3 :] == 0.0)


def test_step_before_reset_raises():
    env = CrowdNavEnv(EnvConfig(n_humans=0))

    with pytest.raises(RuntimeError):
        env.step(np.zeros(2))


def test_timeout_is_reported_as_truncation():
    env = CrowdNavEnv(EnvConfig(n_humans=0, time_limit=0.5))
    env.reset(seed=0)

    results = [env.step(np.zeros(2, dtype=np.float32)) for _ in range(3)]

    *_, (obs, reward, terminated, truncated, info) = results
    assert not terminated
    assert truncated
    assert info["done"] == "timeout"
    assert not any(r[3] for r in results[:-1])


def test_same_seed_gives_same_rollout():
    actions = [np.array([0.0, 1.0]), np.array([0.5, 0.5]), np.array([-0.2, 0.9])]
    runs = []
    for _ in range(2):
        env = CrowdNavEnv(EnvConfig(n_humans=4, ped_policy="mixed"))
        obs, _ = env.reset(seed=3)
        runs.append([obs] + [env.step(a)[0] for a in actions])

    for a, b in zip(*runs):
        assert np.array_equal(a, b)


def test_flatten_truncates_to_max_humans():
    env = CrowdNavEnv(EnvConfig(n_humans=2))
    _, _ = env.reset(seed=1)
    obs = env.state.observation()

    flat = flatten_observation(obs, max_humans=1)

    assert flat.shape == (13,)
    assert np.allclose(flat[8:], obs.humans[0], atol=1e-6)
