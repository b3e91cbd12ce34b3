import logging

import numpy as np
import pytest

from hamnav.config import EnvConfig, RewardConfig
from hamnav.env.crowd import CrowdSim, SocialReward, StepEvents, clip_speed
from hamnav.env.state import AgentState, Done, WorldState
from hamnav.errors import EpisodeDoneError, HamnavError, ScenarioError, StateError
from hamnav.rl.baselines import StraightLineRobot, ZeroRobot
from hamnav.rl.rollout import run_episode


def test_reset_places_agents_on_circle():
    sim = CrowdSim(EnvConfig(n_humans=5, n_static=2))

    state, obs = sim.reset(3)

    assert np.allclose(state.robot.p, [0.0, -8.0])
    assert np.allclose(state.robot.g, [0.0, 8.0])
    movers = state.moving_humans
    assert len(movers) == 5
    for h in movers:
        assert np.linalg.norm(h.p) == pytest.approx(8.0)
        assert np.allclose(h.g, -h.p)
    assert sum(h.is_static for h in state.humans) == 2
    assert obs.robot.shape == (8,)
    assert obs.humans.shape == (7, 5)


def test_reset_is_deterministic_in_seed():
    sim = CrowdSim(EnvConfig(n_humans=4, ped_policy="mixed"))

    a, _ = sim.reset(11)
    b, _ = sim.reset(11)
    c, _ = sim.reset(12)

    assert all(np.array_equal(x.p, y.p) and x.policy == y.policy for x, y in zip(a.humans, b.humans))
    assert not all(np.array_equal(x.p, y.p) for x, y in zip(a.humans, c.humans))


def test_impossible_placement_raises():
    config = EnvConfig(n_humans=15, human_radius=2.0, angle_jitter=0.0, max_placement_attempts=50)

    with pytest.raises(ScenarioError):
        CrowdSim(config).reset(0)


def test_straight_line_robot_reaches_goal_in_empty_world(empty_world):
    sim = CrowdSim(empty_world)

    episode = run_episode(sim, StraightLineRobot(empty_world), seed=0)

    assert episode.done is Done.SUCCESS
    assert len(episode) == 63
    assert episode.final_state.t == pytest.approx(15.75)
    assert episode.rewards[-1] == pytest.approx(10.0 + 2.0 * 0.25)


def test_standing_robot_times_out(empty_world):
    episode = run_episode(CrowdSim(empty_world), ZeroRobot(empty_world), seed=0)

    assert episode.done is Done.TIMEOUT
    assert len(episode) == 161
    assert episode.total_reward == pytest.approx(-0.01 * 161)


def test_collision_takes_priority_over_success():
    robot = AgentState(p=(0.0, 7.5), v=(0.0, 0.0), rho=0.3, g=(0.0, 8.0), v_pref=1.0, kind="robot")
    rock = AgentState(p=(0.0, 8.0), v=(0.0, 0.0), rho=0.3, g=(0.0, 8.0), v_pref=0.0, kind="static")
    state = WorldState(robot=robot, humans=(rock,), t=0.0, T_step=0.25, seed=0)

    outcome, final = CrowdSim().step(state, np.array([0.0, 1.0]))

    assert outcome.done is Done.COLLISION
    assert final.done is Done.COLLISION
    assert outcome.reward == pytest.approx(-20.0 + 2.0 * 0.25)


def test_step_after_end_raises(empty_world):
    episode = run_episode(CrowdSim(empty_world), StraightLineRobot(empty_world), seed=0)

    with pytest.raises(EpisodeDoneError):
        CrowdSim(empty_world).step(episode.final_state, np.zeros(2))


def test_fast_action_is_clipped_with_warning(empty_world, caplog):
    sim = CrowdSim(empty_world)
    state, _ = sim.reset(0)

    with caplog.at_level(logging.WARNING, logger="hamnav.env.crowd"):
        outcome, moved = sim.step(state, np.array([3.0, 0.0]))

    assert outcome.clipped
    assert np.allclose(moved.robot.v, [1.0, 0.0])
    assert "gekappt" in caplog.text


def test_step_is_deterministic_with_environment_noise():
    sim = CrowdSim(EnvConfig(n_humans=3, ped_policy="sf", sigma_env=0.1))
    state, _ = sim.reset(5)

    first, a = sim.step(state, np.array([0.0, 1.0]))
    second, b = sim.step(state, np.array([0.0, 1.0]))

    assert np.array_equal(a.robot.p, b.robot.p)
    assert all(np.array_equal(x.p, y.p) for x, y in zip(a.humans, b.humans))
    assert first.reward == second.reward


def test_pedestrians_keep_speed_limit_and_statics_stay():
    sim = CrowdSim(EnvConfig(n_humans=6, n_static=2, ped_policy="mixed"))
    state, _ = sim.reset(2)
    statics = [h.p.copy() for h in state.humans if h.is_static]

    for _ in range(20):
        _, state = sim.step(state, np.zeros(2))
        if state.done is not None:
            break

    assert all(np.linalg.norm(h.v) <= h.v_pref + 1e-9 for h in state.moving_humans)
    assert all(np.array_equal(h.p, p) for h, p in zip([h for h in state.humans if h.is_static], statics))


def test_reward_terms():
    reward = SocialReward(RewardConfig())
    state, _ = CrowdSim(EnvConfig(n_humans=0)).reset(0)

    total, terms = reward(state, np.zeros(2), StepEvents(None, 0.25, 10.0, 9.75))

    assert terms["discomfort"] == pytest.approx(-0.5 * (0.5 - 0.25) / 0.5)
    assert terms["progress"] == pytest.approx(0.5)
    assert terms["step"] == pytest.approx(-0.01)
    assert total == pytest.approx(-0.25 + 0.5 - 0.01)


def test_clip_speed():
    v, clipped = clip_speed([0.0, 2.0], 1.0)
    kept, untouched = clip_speed([0.6, 0.8], 1.0)

    assert np.allclose(v, [0.0, 1.0]) and clipped
    assert np.allclose(kept, [0.6, 0.8]) and not untouched


def test_robot_visibility_adds_robot_to_neighbors():
    hidden = CrowdSim(EnvConfig(n_humans=2))
    visible = CrowdSim(EnvConfig(n_humans=2, robot_visible=True))
    state, _ = hidden.reset(0)

    assert len(hidden._neighbors(state, 0)) == 1
    assert any(n is state.robot for n in visible._neighbors(state, 0))


@pytest.mark.parametrize(
    "fields",
    [
        {"rho": 0.0},
        {"v": (2.0, 0.0)},
        {"kind": "static", "v_pref": 0.0, "v": (0.1, 0.0)},
        {"v_pref": 0.0},
    ],
)
def test_invalid_agent_state_raises_domain_error(fields):
    base = dict(p=(0.0, 0.0), v=(0.0, 0.0), rho=0.3, g=(1.0, 0.0), v_pref=1.0)

    with pytest.raises(StateError) as info:
        AgentState(**{**base, **fields})

    assert isinstance(info.value, HamnavError)
