import numpy as np
import pytest

from hamnav.config import EncoderConfig
from hamnav.encoder import ObservationWindow, STEncoder, assemble_blocks
from hamnav.errors import DimensionError, StateError
from hamnav.nn import tensor as T
from hamnav.nn.params import ParamStore
from hamnav.nn.tensor import Tensor

CONFIG = EncoderConfig(d_model=8, n_heads=2, window=3, head_hidden=8, energy_width=4)


def make_window(rng, n_agents=3, steps=3, absent=()):
    entries = rng.normal(size=(n_agents, steps, 8))
    present = np.ones(n_agents, dtype=bool)
    for i in absent:
        entries[i] = 0.0
        present[i] = False
    return ObservationWindow(entries, present)


@pytest.fixture
def encoder() -> STEncoder:
    return STEncoder(ParamStore(seed=0), CONFIG)


def test_window_validation():
    entries = np.zeros((2, 3, 8))

    with pytest.raises(DimensionError):
        ObservationWindow(np.zeros((2, 3, 7)), np.ones(2, dtype=bool))
    with pytest.raises(StateError):
        ObservationWindow(entries, np.array([False, True]))
    with pytest.raises(StateError):
        ObservationWindow(np.ones((2, 3, 8)), np.array([True, False]))


def test_output_shapes(encoder):
    window = make_window(np.random.default_rng(0))

    features, learned = encoder(window)

    assert features.Y_F.shape == (3, 3, 8)
    assert features.F_R.shape == (3, 3, 8)
    assert learned.J_blocks.shape == (3, 3, 4, 4)
    assert learned.R_blocks.shape == (3, 3, 4, 4)
    assert learned.grad_h.shape == (3, 4)
    assert learned.H.shape == ()


def test_interconnection_is_skew_and_dissipation_is_psd(encoder):
    window = make_window(np.random.default_rng(1), n_agents=4)

    _, learned = encoder(window)
    J = assemble_blocks(learned.J_blocks)
    R = assemble_blocks(learned.R_blocks)

    assert J.shape == (16, 16)
    assert np.allclose(J, -J.T, atol=1e-12)
    assert np.allclose(R, R.T, atol=1e-12)
    assert np.linalg.eigvalsh(R).min() >= -1e-10


def test_dissipation_blocks_are_diagonal(encoder):
    _, learned = encoder(make_window(np.random.default_rng(2)))

    blocks = learned.R_blocks.data
    off_diagonal = blocks * (1.0 - np.eye(4))

    assert np.allclose(off_diagonal, 0.0)
    assert np.all(np.diagonal(blocks, axis1=-2, axis2=-1) >= 0.0)


def test_absent_agents_contribute_nothing(encoder):
    window = make_window(np.random.default_rng(3), absent=(2,))

    _, learned = encoder(window)

    assert np.allclose(learned.J_blocks.data[2], 0.0)
    assert np.allclose(learned.J_blocks.data[:, 2], 0.0)
    assert np.allclose(learned.R_blocks.data[2], 0.0)
    assert np.allclose(learned.grad_h.data[2], 0.0)


def test_energy_gradient_matches_finite_differences(encoder):
    window = make_window(np.random.default_rng(4))
    features, learned = encoder(window)
    context = T.mean(features.Y_F, axis=-2).detach()
    goal, present = window.robot_goal(), window.present

    def total(states: np.ndarray) -> float:
        E, U = encoder.energy(context, Tensor(states), goal, present)
        return float((E + U).data)

    base = window.states()
    expected = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        step = np.zeros_like(base)
        step[idx] = 1e-6
        expected[idx] = (total(base + step) - total(base - step)) / 2e-6

    assert np.allclose(learned.grad_h.data, expected, atol=1e-5)
    assert learned.E.data >= 0.0 and learned.U.data >= 0.0


def test_create_graph_keeps_gradient_differentiable(encoder):
    window = make_window(np.random.default_rng(5))

    _, plain = encoder(window)
    _, tracked = encoder(window, create_graph=True)

    assert not plain.grad_h.requires_grad
    assert tracked.grad_h.requires_grad
    assert np.allclose(plain.grad_h.data, tracked.grad_h.data)


def test_batched_window_matches_single(encoder):
    rng = np.random.default_rng(6)
    a, b = make_window(rng), make_window(rng)

    _, batched = encoder(ObservationWindow.stack([a, b]))
    _, single = encoder(b)

    assert batched.grad_h.shape == (2, 3, 4)
    assert np.allclose(batched.grad_h.data[1], single.grad_h.data)
    assert np.allclose(batched.J_blocks.data[1], single.J_blocks.data)


def test_zero_window_is_finite(encoder):
    window = ObservationWindow(np.zeros((1, 3, 8)), np.ones(1, dtype=bool))

    _, learned = encoder(window)

    assert np.isfinite(learned.H.data)
    assert np.allclose(learned.J_blocks.data[0, 0], -learned.J_blocks.data[0, 0].T)


def test_encode_then_heads_matches_call(encoder):
    window = make_window(np.random.default_rng(7), absent=(2,))

    features = encoder.encode(window)
    learned = encoder.hamiltonian_heads(features, window)
    _, combined = encoder(window)

    assert np.allclose(learned.J_blocks.data, combined.J_blocks.data)
    assert np.allclose(learned.grad_h.data, combined.grad_h.data)
    assert float(learned.H.data) == pytest.approx(float(combined.H.data))
