import numpy as np
import pytest

from hamnav.env.crowd import clip_speed
from hamnav.env.orca import Line, orca_velocity, preferred_velocity, solve_orca
from hamnav.env.state import AgentState
from hamnav.errors import StateError


def agent(p, g, v=(0.0, 0.0), **kw) -> AgentState:
    return AgentState(p=p, v=v, rho=0.3, g=g, v_pref=1.0, **kw)


def test_preferred_velocity_points_to_goal_without_overshoot():
    far = agent((0.0, 0.0), (3.0, 4.0))
    near = agent((0.0, 0.0), (0.1, 0.0))
    there = agent((1.0, 1.0), (1.0, 1.0))

    assert np.allclose(preferred_velocity(far, 0.25), [0.6, 0.8])
    assert np.allclose(preferred_velocity(near, 0.25), [0.4, 0.0])
    assert np.allclose(preferred_velocity(there, 0.25), [0.0, 0.0])


def test_solve_orca_projects_onto_half_plane():
    line = Line(point=(0.5, 0.0), direction=(0.0, 1.0))

    result = solve_orca([line], (1.0, 0.0), 1.0)

    assert result.feasible
    assert np.allclose(result.velocity, [0.5, 0.0])


def test_solve_orca_respects_speed_limit():
    result = solve_orca([], (3.0, 4.0), 1.0)

    assert np.allclose(result.velocity, [0.6, 0.8])


def test_lone_agent_moves_at_preferred_velocity():
    me = agent((0.0, -8.0), (0.0, 8.0))

    result = orca_velocity(me, [], 5.0, 0.25)

    assert np.allclose(result.velocity, [0.0, 1.0])


def test_agent_in_neighbor_list_raises():
    me = agent((0.0, 0.0), (1.0, 0.0))

    with pytest.raises(StateError):
        orca_velocity(me, [me], 5.0, 0.25)


def test_far_neighbors_are_ignored():
    me = agent((0.0, 0.0), (5.0, 0.0))
    other = agent((3.0, 0.0), (-5.0, 0.0), v=(-1.0, 0.0))

    result = orca_velocity(me, [other], 5.0, 0.25, neighbor_dist=2.0)

    assert result.lines == ()
    assert np.allclose(result.velocity, [1.0, 0.0])


def test_two_agents_swap_without_collision():
    a = agent((-4.0, 0.0), (4.0, 0.0))
    b = agent((4.0, 0.1), (-4.0, 0.1))
    dt, gaps = 0.25, []

    for _ in range(80):
        va = clip_speed(orca_velocity(a, [b], 5.0, dt).velocity, 1.0)[0]
        vb = clip_speed(orca_velocity(b, [a], 5.0, dt).velocity, 1.0)[0]
        a = a.moved(a.p + va * dt, va)
        b = b.moved(b.p + vb * dt, vb)
        gaps.append(float(np.linalg.norm(a.p - b.p)) - 0.6)

    assert min(gaps) > -1e-6
    assert np.linalg.norm(a.p - a.g) < 0.5
    assert np.linalg.norm(b.p - b.g) < 0.5


def test_static_obstacle_is_avoided():
    me = agent((0.0, -3.0), (0.0, 3.0))
    rock = AgentState(p=(0.0, 0.0), v=(0.0, 0.0), rho=0.3, g=(0.0, 0.0), v_pref=0.0, kind="static")
    dt, gaps = 0.25, []

    for _ in range(40):
        v = clip_speed(orca_velocity(me, [rock], 5.0, dt).velocity, 1.0)[0]
        me = me.moved(me.p + v * dt, v)
        gaps.append(float(np.linalg.norm(me.p - rock.p)) - 0.6)

    assert min(gaps) > -1e-6
