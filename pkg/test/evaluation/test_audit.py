import numpy as np
import pytest

from hamnav.env.crowd import CrowdSim
from hamnav.evaluation.audit import AUDIT_HEADER, TraceStep, audit_lines, energy_audit, energy_trace
from hamnav.ph import NominalSystem
from hamnav.rl.rollout import run_episode

DT = 0.25


@pytest.fixture
def states(small_policy, small_settings):
    return run_episode(CrowdSim(small_settings.env), small_policy, seed=2).states


def transition(system, p0, v0, p1, v1):
    return TraceStep(
        x=system.state(p0, v0),
        x_next=system.state(p1, v1),
        dt=DT,
        system=system,
        u_cmd=np.zeros(2),
    )


def test_trace_has_one_step_per_transition(small_policy, states):
    trace = energy_trace(small_policy, states)

    assert len(trace) == len(states) - 1
    assert trace[0].x.shape == (4,)
    assert trace[0].u_cmd.shape == (2,)
    assert np.allclose(trace[0].x_next[:2], states[1].robot.p)
    assert np.allclose(trace[0].x_next[2:], small_policy.settings.policy.mass * states[1].robot.v)


def test_recorded_episode_is_explained_by_its_input(small_policy, states):
    rows = energy_audit(energy_trace(small_policy, states))

    for row in rows:
        assert row.hdot == pytest.approx(row.supplied - row.dissipated, abs=1e-9)
        assert abs(row.residual) < 1e-9
        assert row.dissipated >= -1e-12
        assert not row.violation
        assert row.H >= 0.0


def test_teleport_away_from_goal_is_flagged():
    system = NominalSystem(mass=1.0, goal=np.array([4.0, 0.0]), stiffness=1.0, damping=1.0)

    [row] = energy_audit([transition(system, [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0], [0.0, 0.0])])

    # ½·k·(25 − 16) / T, ohne zugeführte Leistung
    assert row.hdot == pytest.approx(18.0)
    assert row.supplied == pytest.approx(0.0)
    assert row.residual == pytest.approx(18.0)
    assert row.violation


def test_lossless_transition_matches_supplied_power():
    system = NominalSystem(mass=2.0, goal=np.array([3.0, 1.0]), stiffness=0.5, damping=0.0)
    v1 = np.array([0.6, -0.2])

    [row] = energy_audit([transition(system, [0.0, 0.0], [0.1, 0.3], v1 * DT, v1)])

    assert row.dissipated == 0.0
    assert row.hdot == pytest.approx(row.supplied, abs=1e-8)
    assert not row.violation


def test_braking_toward_goal_dissipates_without_violation():
    system = NominalSystem(mass=1.0, goal=np.array([5.0, 0.0]), stiffness=0.0, damping=1.0)
    v1 = np.array([0.2, 0.0])

    [row] = energy_audit([transition(system, [0.0, 0.0], [1.0, 0.0], v1 * DT, v1)])

    assert row.hdot < 0.0
    assert row.dissipated == pytest.approx(0.04)
    assert row.hdot <= row.supplied
    assert not row.violation


def test_robot_at_rest_has_zero_balance():
    system = NominalSystem(mass=1.0, goal=np.array([1.0, 1.0]), stiffness=1.0, damping=1.0)

    [row] = energy_audit([transition(system, [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])])

    assert row.hdot == 0.0
    assert row.supplied == pytest.approx(0.0)
    assert row.H == pytest.approx(1.0)
    assert not row.violation


def test_audit_lines(small_policy, states):
    rows = energy_audit(energy_trace(small_policy, states[:3]))

    lines = audit_lines(rows)

    assert lines[0] == AUDIT_HEADER
    assert len(lines) == 3
    assert lines[1].startswith("0\t")
    assert len(lines[1].split("\t")) == len(AUDIT_HEADER.split("\t"))
    assert lines[1].split("\t")[-1] == "0"
