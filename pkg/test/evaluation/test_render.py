import numpy as np
import pytest

from hamnav.config import EnvConfig
from hamnav.env.crowd import CrowdSim
from hamnav.env.trajectory import parse_trajectory, trajectory_lines, write_trajectory
from hamnav.evaluation.render import MIN_ALPHA, build_scene, render_scene, render_trajectory
from hamnav.rl.baselines import StraightLineRobot
from hamnav.rl.rollout import run_episode


@pytest.fixture(scope="module")
def states():
    config = EnvConfig(n_humans=2, n_static=1, time_limit=2.0)
    return run_episode(CrowdSim(config), StraightLineRobot(config), seed=0).states


def test_scene_segments_fade_in_over_time(states):
    scene = build_scene(parse_trajectory(trajectory_lines(states)))

    robot = scene.paths()[0]
    alphas = [s.alpha for s in robot]
    assert len(robot) == len(states) - 1
    assert alphas == sorted(alphas)
    assert alphas[0] > MIN_ALPHA
    assert alphas[-1] == pytest.approx(1.0)


def test_static_agents_have_no_path_but_a_circle(states):
    scene = build_scene(parse_trajectory(trajectory_lines(states)))

    assert 3 not in scene.paths()
    assert sorted(c.agent_id for c in scene.circles) == [0, 1, 2, 3]
    assert sorted(agent for agent, _, _ in scene.goals) == [0, 1, 2]
    robot_circle = next(c for c in scene.circles if c.agent_id == 0)
    assert np.allclose(robot_circle.centre, states[-1].robot.p, atol=1e-6)
    assert robot_circle.radius == pytest.approx(0.3)


def test_render_is_byte_identical(states, tmp_path):
    path = write_trajectory(tmp_path / "ep.csv", states)

    a = render_trajectory(path, tmp_path / "a.svg").read_bytes()
    b = render_trajectory(path, tmp_path / "b.svg").read_bytes()

    assert a.startswith(b"<?xml")
    assert a == b


def test_render_scene_creates_parent_directory(states, tmp_path):
    scene = build_scene(parse_trajectory(trajectory_lines(states[:2])))

    out = render_scene(scene, tmp_path / "nested" / "scene.svg")

    assert out.exists()
