# -*- coding: utf-8 -*-

"""
Bausteine für Encoder, Diffusionskopf und Kritiker: lineare Schichten,
skalierte Dot-Product-Attention, Layer-Normalisierung und kleine Module,
deren Parameter in einem `ParamStore` liegen.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from ..errors import AttentionMaskError, DimensionError
from . import tensor as T
from .params import ParamStore
from .tensor import Operand, Tensor

MASK_FILL = -1e30


# --- 1. Funktionale Kerne ---
def linear_forward(weights: Operand, bias: Operand | None, inputs: Operand) -> Tensor:
    """output[b] = weights · input[b] + bias; `inputs` darf führende Batchachsen haben."""
    weights, inputs = T.as_tensor(weights), T.as_tensor(inputs)
    if weights.ndim != 2 or inputs.ndim < 1 or inputs.shape[-1] != weights.shape[1]:
        raise DimensionError("linear_forward: innere Dimensionen passen nicht", weights.shape, inputs.shape)
    squeeze = inputs.ndim == 1
    if squeeze:
        inputs = T.reshape(inputs, (1, inputs.shape[0]))
    out = inputs @ T.swap_last(weights)
    if bias is not None:
        bias = T.as_tensor(bias)
        if bias.shape != (weights.shape[0],):
            raise DimensionError("linear_forward: Bias passt nicht zu den Gewichten", weights.shape, bias.shape)
        out = out + bias
    return T.reshape(out, (weights.shape[0],)) if squeeze else out


def attention_forward(
    queries: Operand,
    keys: Operand,
    values: Operand,
    mask: NDArray[np.bool_] | None = None,
    return_weights: bool = False,
) -> Tensor | tuple[Tensor, Tensor]:
    """
    softmax(QKᵀ/√d)·V über die vorletzte Achse.

    `mask[..., i, j] = True` erlaubt Query i, Key j zu sehen. Jede Query braucht
    mindestens einen erlaubten Key.
    """
    q, k, v = T.as_tensor(queries), T.as_tensor(keys), T.as_tensor(values)
    d = q.shape[-1]
    if d <= 0:
        raise DimensionError("attention_forward: Merkmalsbreite muss positiv sein", q.shape)
    if k.shape[-1] != d or k.shape[-2] != v.shape[-2]:
        raise DimensionError("attention_forward: Q/K/V passen nicht", q.shape, k.shape, v.shape)
    scores = (q @ T.swap_last(k)) * (1.0 / math.sqrt(d))
    if mask is not None:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), scores.shape)
        if not mask.any(axis=-1).all():
            raise AttentionMaskError("mindestens eine Query-Zeile ist vollständig maskiert")
        scores = scores + np.where(mask, 0.0, MASK_FILL)
    shift = scores.data.max(axis=-1, keepdims=True)
    e = T.exp(scores - shift)
    weights = e / T.sum_(e, axis=-1, keepdims=True)
    out = weights @ v
    return (out, weights) if return_weights else out


def layer_norm(x: Operand, gamma: Operand, beta: Operand, eps: float = 1e-5) -> Tensor:
    x = T.as_tensor(x)
    centred = x - T.mean(x, axis=-1, keepdims=True)
    var = T.mean(centred * centred, axis=-1, keepdims=True)
    return centred / T.sqrt(var + eps) * gamma + beta


# --- 2. Module ---
class Module:
    """Bindet Parameternamen unter einem Präfix an einen `ParamStore`."""

    def __init__(self, store: ParamStore, prefix: str):
        self.store = store
        self.prefix = prefix

    def _create(self, name: str, shape: tuple[int, ...], init="glorot") -> str:
        full = f"{self.prefix}.{name}"
        self.store.create(full, shape, init)
        return full


class Linear(Module):
    def __init__(self, store: ParamStore, prefix: str, in_features: int, out_features: int, bias: bool = True):
        super().__init__(store, prefix)
        self.in_features, self.out_features = in_features, out_features
        self.w = self._create("weight", (out_features, in_features))
        self.b = self._create("bias", (out_features,), "zeros") if bias else None

    def __call__(self, x: Operand) -> Tensor:
        bias = self.store[self.b] if self.b is not None else None
        return linear_forward(self.store[self.w], bias, x)


class LayerNorm(Module):
    def __init__(self, store: ParamStore, prefix: str, width: int):
        super().__init__(store, prefix)
        self.gamma = self.store.create(f"{prefix}.gamma", (width,), "constant", 1.0).name
        self.beta = self._create("beta", (width,), "zeros")

    def __call__(self, x: Operand) -> Tensor:
        return layer_norm(x, self.store[self.gamma], self.store[self.beta])


class MLP(Module):
    """Lineare Schichten mit tanh dazwischen; die letzte Schicht ist linear."""

    def __init__(
        self,
        store: ParamStore,
        prefix: str,
        sizes: list[int],
        activation: Callable[[Tensor], Tensor] = T.tanh,
        bias: bool = True,
    ):
        super().__init__(store, prefix)
        self.layers = [
            Linear(store, f"{prefix}.l{i}", sizes[i], sizes[i + 1], bias=bias) for i in range(len(sizes) - 1)
        ]
        self.activation = activation

    def __call__(self, x: Operand) -> Tensor:
        h = T.as_tensor(x)
        for i, layer in enumerate(self.layers):
            h = layer(h)
            if i < len(self.layers) - 1:
                h = self.activation(h)
        return h


class MultiHeadAttention(Module):
    def __init__(self, store: ParamStore, prefix: str, d_model: int, n_heads: int):
        super().__init__(store, prefix)
        if d_model % n_heads:
            raise DimensionError(f"d_model={d_model} nicht durch n_heads={n_heads} teilbar")
        self.d_model, self.n_heads = d_model, n_heads
        self.q = Linear(store, f"{prefix}.q", d_model, d_model)
        self.k = Linear(store, f"{prefix}.k", d_model, d_model)
        self.v = Linear(store, f"{prefix}.v", d_model, d_model)
        self.o = Linear(store, f"{prefix}.o", d_model, d_model)

    def _split(self, x: Tensor) -> Tensor:
        *batch, length, _ = x.shape
        head_dim = self.d_model // self.n_heads
        x = T.reshape(x, (*batch, length, self.n_heads, head_dim))
        nb = len(batch)
        return T.transpose(x, (*range(nb), nb + 1, nb, nb + 2))

    def __call__(self, x: Tensor, mask: NDArray[np.bool_] | None = None) -> Tensor:
        *batch, length, _ = x.shape
        q, k, v = self._split(self.q(x)), self._split(self.k(x)), self._split(self.v(x))
        if mask is not None:
            mask = np.expand_dims(np.asarray(mask, dtype=bool), axis=-3)
        heads = attention_forward(q, k, v, mask)
        nb = len(batch)
        merged = T.transpose(heads, (*range(nb), nb + 1, nb, nb + 2))
        return self.o(T.reshape(merged, (*batch, length, self.d_model)))


class TransformerBlock(Module):
    """Post-Norm-Block: LN(x + MHA(x)), danach LN(x + FF(x))."""

    def __init__(self, store: ParamStore, prefix: str, d_model: int, n_heads: int):
        super().__init__(store, prefix)
        self.attention = MultiHeadAttention(store, f"{prefix}.attn", d_model, n_heads)
        self.norm1 = LayerNorm(store, f"{prefix}.ln1", d_model)
        self.ff = MLP(store, f"{prefix}.ff", [d_model, 2 * d_model, d_model])
        self.norm2 = LayerNorm(store, f"{prefix}.ln2", d_model)

    def __call__(self, x: Tensor, mask: NDArray[np.bool_] | None = None) -> Tensor:
        x = self.norm1(x + self.attention(x, mask))
        return self.norm2(x + self.ff(x))
