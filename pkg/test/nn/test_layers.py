import numpy as np
import pytest

from hamnav.errors import AttentionMaskError, DimensionError
from hamnav.nn import tensor as T
from hamnav.nn.layers import MLP, Linear, MultiHeadAttention, TransformerBlock, attention_forward, layer_norm, linear_forward
from hamnav.nn.params import ParamStore
from hamnav.nn.tensor import Tensor, grad


def test_linear_forward_matches_numpy():
    rng = np.random.default_rng(0)
    w, b, x = rng.normal(size=(3, 4)), rng.normal(size=3), rng.normal(size=(5, 4))

    out = linear_forward(w, b, x)

    assert np.allclose(out.data, x @ w.T + b)


def test_linear_forward_single_vector_and_shape_error():
    w = np.eye(2)

    assert linear_forward(w, None, np.array([1.0, 2.0])).shape == (2,)
    with pytest.raises(DimensionError):
        linear_forward(w, None, np.ones(3))


def test_attention_weights_are_row_stochastic():
    rng = np.random.default_rng(1)
    q, k, v = (rng.normal(size=(2, 4, 3)) for _ in range(3))

    out, weights = attention_forward(q, k, v, return_weights=True)

    assert out.shape == (2, 4, 3)
    assert np.allclose(weights.data.sum(axis=-1), 1.0)


def test_attention_respects_mask():
    rng = np.random.default_rng(2)
    q, k, v = (rng.normal(size=(3, 2)) for _ in range(3))
    causal = np.tril(np.ones((3, 3), dtype=bool))

    _, weights = attention_forward(q, k, v, causal, return_weights=True)

    assert np.allclose(np.triu(weights.data, k=1), 0.0)
    assert weights.data[0, 0] == pytest.approx(1.0)


def test_fully_masked_row_raises():
    x = np.ones((2, 2))
    mask = np.array([[True, False], [False, False]])

    with pytest.raises(AttentionMaskError):
        attention_forward(x, x, x, mask)


def test_layer_norm_normalizes_last_axis():
    x = np.array([[1.0, 2.0, 3.0, 4.0]])

    out = layer_norm(x, np.ones(4), np.zeros(4))

    assert out.data.mean() == pytest.approx(0.0, abs=1e-12)
    assert out.data.var() == pytest.approx(1.0, rel=1e-4)


def test_mlp_shapes_and_parameter_names():
    store = ParamStore(seed=0)

    net = MLP(store, "net", [4, 6, 2])
    out = net(np.ones((3, 4)))

    assert out.shape == (3, 2)
    assert set(store) == {"net.l0.weight", "net.l0.bias", "net.l1.weight", "net.l1.bias"}


def test_modules_share_parameters_by_name():
    store = ParamStore(seed=0)

    first = Linear(store, "shared", 2, 2)
    second = Linear(store, "shared", 2, 2)

    assert store[first.w] is store[second.w]
    assert len(store) == 2


def test_multi_head_attention_requires_divisible_width():
    with pytest.raises(DimensionError):
        MultiHeadAttention(ParamStore(), "attn", 6, 4)


def test_transformer_block_is_differentiable():
    store = ParamStore(seed=3)
    block = TransformerBlock(store, "blk", 4, 2)
    x = np.random.default_rng(3).normal(size=(2, 3, 4))

    loss = T.sum_(T.square(block(Tensor(x))))
    names = list(store)
    grads = grad(loss, [store[n] for n in names])

    assert all(g.shape == store[n].shape for n, g in zip(names, grads))
    assert any(np.abs(g.data).sum() > 0 for g in grads)
