import numpy as np
import pytest

from hamnav.env.social_force import SocialForceParams, advance_velocity, repulsion, social_force
from hamnav.env.state import AgentState


def agent(p, g=(10.0, 0.0), v=(0.0, 0.0)) -> AgentState:
    return AgentState(p=p, v=v, rho=0.3, g=g, v_pref=1.0)


def test_driving_force_towards_goal():
    me = agent((0.0, 0.0), g=(0.0, 5.0))

    force = social_force(me, [], params=SocialForceParams(tau=0.5))

    assert np.allclose(force, [0.0, 2.0])


def test_no_driving_force_at_goal():
    me = agent((1.0, 1.0), g=(1.0, 1.0), v=(0.5, 0.0))

    force = social_force(me, [], params=SocialForceParams(tau=0.5))

    assert np.allclose(force, [-1.0, 0.0])


def test_repulsion_pushes_apart_and_decays():
    me = agent((0.0, 0.0))
    close, far = agent((1.0, 0.0)), agent((2.0, 0.0))
    params = SocialForceParams()

    near_force = repulsion(me, close, params)
    far_force = repulsion(me, far, params)

    assert near_force[0] < 0.0 and near_force[1] == pytest.approx(0.0)
    assert np.linalg.norm(far_force) < np.linalg.norm(near_force)


def test_overlapping_pair_follows_exponential_law():
    me, other = agent((0.0, 0.0)), agent((0.3, 0.0))
    params = SocialForceParams(A=2.0, B=0.08, force_max=10.0)

    force = repulsion(me, other, params)

    # 2·exp((0.6 − 0.3)/0.08), über force_max hinaus
    assert force[0] == pytest.approx(-2.0 * np.exp(3.75))
    assert force[1] == pytest.approx(0.0)
    assert np.linalg.norm(force) > params.force_max


def test_coincident_agents_get_capped_force_in_random_direction():
    me, other = agent((0.0, 0.0)), agent((0.0, 0.0))

    first = repulsion(me, other, SocialForceParams(), np.random.default_rng(3))
    second = repulsion(me, other, SocialForceParams(), np.random.default_rng(3))

    assert np.linalg.norm(first) == pytest.approx(10.0)
    assert np.array_equal(first, second)


def test_advance_velocity_caps_speed():
    me = agent((0.0, 0.0), v=(0.8, 0.0))

    slow = advance_velocity(me, np.array([0.0, 0.4]), 0.25)
    fast = advance_velocity(me, np.array([10.0, 0.0]), 0.25)

    assert np.allclose(slow, [0.8, 0.1])
    assert np.allclose(fast, [1.0, 0.0])
