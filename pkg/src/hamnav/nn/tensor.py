# -*- coding: utf-8 -*-

"""
Dichter float64-Tensor mit Rückwärtsdifferentiation über ein Band (Tape).

Jede Operation erzeugt einen neuen, unveränderlichen `Tensor`, der sich seine
Eltern und pro Elternteil eine Vektor-Jacobi-Funktion (VJP) merkt. Die VJPs
sind selbst aus Tensor-Operationen gebaut; mit `create_graph=True` entsteht
beim Rückwärtsdurchlauf daher wieder ein Graph, und Ableitungen zweiter Ordnung
(z.B. Parametergradienten von ∇ₓH) funktionieren ohne Sonderfall.

Der Graph wird pro Vorwärtsdurchlauf aufgebaut und nach `grad` nicht mehr
referenziert; Python räumt ihn ab.
"""

# --- 1. Importe ---
from __future__ import annotations

import contextlib
import threading
from typing import Callable, Iterator, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import DimensionError, GraphError, NonFiniteError

Array = NDArray[np.float64]
Operand = Union["Tensor", ArrayLike]
Vjp = Callable[["Tensor"], "Tensor"]


# --- 2. Gradientenmodus (pro Thread) ---
class _GradMode(threading.local):
    enabled: bool = True


_mode = _GradMode()


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Innerhalb des Blocks werden keine Graphkanten aufgezeichnet."""
    previous = _mode.enabled
    _mode.enabled = False
    try:
        yield
    finally:
        _mode.enabled = previous


@contextlib.contextmanager
def enable_grad() -> Iterator[None]:
    previous = _mode.enabled
    _mode.enabled = True
    try:
        yield
    finally:
        _mode.enabled = previous


def is_grad_enabled() -> bool:
    return _mode.enabled


def _check_finite(arr: Array, what: str) -> None:
    if not np.isfinite(arr).all():
        raise NonFiniteError(f"nicht-endliche Werte in {what} (Form {arr.shape})")


# --- 3. Die Tensor-Klasse ---
class Tensor:
    """
    Unveränderlicher Wert samt optionaler Graphinformation.

    `__array_ufunc__ = None` sorgt dafür, dass `ndarray @ Tensor` und
    `ndarray - Tensor` an die reflektierten Methoden dieses Typs delegieren.
    """

    __array_ufunc__ = None
    __slots__ = ("data", "requires_grad", "_parents", "_vjps", "name", "__weakref__")

    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: str | None = None):
        if isinstance(data, Tensor):
            data = data.data
        arr = np.array(data, dtype=np.float64)
        _check_finite(arr, name or "Tensor")
        arr.flags.writeable = False
        self.data: Array = arr
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._vjps: tuple[Vjp, ...] = ()
        self.name = name

    @classmethod
    def _from_op(cls, data: ArrayLike, parents: Sequence["Tensor"], vjps: Sequence[Vjp], op: str) -> "Tensor":
        arr = np.asarray(data, dtype=np.float64)
        _check_finite(arr, op)
        out = object.__new__(Tensor)
        out.data = arr
        out.name = None
        track = _mode.enabled and any(p.requires_grad for p in parents)
        out.requires_grad = track
        out._parents = tuple(parents) if track else ()
        out._vjps = tuple(vjps) if track else ()
        return out

    # Eigenschaften
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return swap_last(self)

    def numpy(self) -> Array:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self) -> "Tensor":
        return Tensor._from_op(self.data, (), (), "detach")

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    def __len__(self) -> int:
        return self.shape[0]

    # Operatoren
    def __add__(self, other: Operand) -> "Tensor":
        return add(self, other)

    def __radd__(self, other: Operand) -> "Tensor":
        return add(other, self)

    def __sub__(self, other: Operand) -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other: Operand) -> "Tensor":
        return sub(other, self)

    def __mul__(self, other: Operand) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other: Operand) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, other: Operand) -> "Tensor":
        return div(self, other)

    def __rtruediv__(self, other: Operand) -> "Tensor":
        return div(other, self)

    def __neg__(self) -> "Tensor":
        return neg(self)

    def __pow__(self, exponent: float) -> "Tensor":
        return power(self, exponent)

    def __matmul__(self, other: Operand) -> "Tensor":
        return matmul(self, other)

    def __rmatmul__(self, other: Operand) -> "Tensor":
        return matmul(other, self)

    def __getitem__(self, index) -> "Tensor":
        return getitem(self, index)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes or None)


def as_tensor(value: Operand) -> Tensor:
    """Konstanten werden zu Tensoren ohne Gradient; Tensoren bleiben unverändert."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


# --- 4. Broadcasting-Hilfen ---
def _reduce_to(arr: Array, shape: tuple[int, ...]) -> Array:
    while arr.ndim > len(shape):
        arr = arr.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and arr.shape[axis] != 1:
            arr = arr.sum(axis=axis, keepdims=True)
    return arr


def sum_to(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    """Summiert gebroadcastete Achsen weg, bis `shape` erreicht ist."""
    if x.shape == tuple(shape):
        return x
    return Tensor._from_op(
        _reduce_to(x.data, tuple(shape)), (x,), (lambda g: broadcast_to(g, x.shape),), "sum_to"
    )


def broadcast_to(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    if x.shape == tuple(shape):
        return x
    return Tensor._from_op(
        np.broadcast_to(x.data, shape), (x,), (lambda g: sum_to(g, x.shape),), "broadcast_to"
    )


# --- 5. Elementweise Operationen ---
def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        a.data + b.data,
        (a, b),
        (lambda g: sum_to(g, a.shape), lambda g: sum_to(g, b.shape)),
        "add",
    )


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        a.data - b.data,
        (a, b),
        (lambda g: sum_to(g, a.shape), lambda g: sum_to(neg(g), b.shape)),
        "sub",
    )


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        a.data * b.data,
        (a, b),
        (lambda g: sum_to(mul(g, b), a.shape), lambda g: sum_to(mul(g, a), b.shape)),
        "mul",
    )


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        a.data / b.data,
        (a, b),
        (
            lambda g: sum_to(div(g, b), a.shape),
            lambda g: sum_to(neg(div(mul(g, a), mul(b, b))), b.shape),
        ),
        "div",
    )


def neg(a: Operand) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(-a.data, (a,), (lambda g: neg(g),), "neg")


def power(a: Operand, exponent: float) -> Tensor:
    a = as_tensor(a)
    p = float(exponent)
    return Tensor._from_op(
        a.data**p, (a,), (lambda g: mul(g, mul(p, power(a, p - 1.0))),), "power"
    )


def square(a: Operand) -> Tensor:
    a = as_tensor(a)
    return mul(a, a)


def exp(a: Operand) -> Tensor:
    a = as_tensor(a)
    out = Tensor._from_op(np.exp(a.data), (a,), (lambda g: mul(g, out),), "exp")
    return out


def log(a: Operand) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(np.log(a.data), (a,), (lambda g: div(g, a),), "log")


def sqrt(a: Operand) -> Tensor:
    a = as_tensor(a)
    out = Tensor._from_op(np.sqrt(a.data), (a,), (lambda g: div(mul(g, 0.5), out),), "sqrt")
    return out


def tanh(a: Operand) -> Tensor:
    a = as_tensor(a)
    out = Tensor._from_op(
        np.tanh(a.data), (a,), (lambda g: mul(g, sub(1.0, mul(out, out))),), "tanh"
    )
    return out


def sigmoid(a: Operand) -> Tensor:
    a = as_tensor(a)
    data = np.exp(-np.logaddexp(0.0, -a.data))
    out = Tensor._from_op(
        data, (a,), (lambda g: mul(g, mul(out, sub(1.0, out))),), "sigmoid"
    )
    return out


def softplus(a: Operand) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(
        np.logaddexp(0.0, a.data), (a,), (lambda g: mul(g, sigmoid(a)),), "softplus"
    )


# --- 6. Reduktionen und Formoperationen ---
def _normalize_axes(axis, ndim: int) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(sorted(a % ndim for a in axis))


def sum_(a: Operand, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)
    kept_shape = tuple(1 if i in axes else s for i, s in enumerate(a.shape))
    return Tensor._from_op(
        a.data.sum(axis=axes, keepdims=keepdims),
        (a,),
        (lambda g: broadcast_to(reshape(g, kept_shape), a.shape),),
        "sum",
    )


def mean(a: Operand, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)
    count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
    return div(sum_(a, axis=axis, keepdims=keepdims), float(count))


def reshape(a: Operand, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(
        a.data.reshape(tuple(shape)), (a,), (lambda g: reshape(g, a.shape),), "reshape"
    )


def transpose(a: Operand, axes: Sequence[int] | None = None) -> Tensor:
    a = as_tensor(a)
    axes = tuple(range(a.ndim))[::-1] if axes is None else tuple(a_ % a.ndim for a_ in axes)
    inverse = tuple(np.argsort(axes))
    return Tensor._from_op(
        a.data.transpose(axes), (a,), (lambda g: transpose(g, inverse),), "transpose"
    )


def swap_last(a: Operand) -> Tensor:
    """Vertauscht die letzten beiden Achsen (Matrix-Transponierte im Batch)."""
    a = as_tensor(a)
    axes = list(range(a.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return transpose(a, axes)


def _is_basic_index(index) -> bool:
    items = index if isinstance(index, tuple) else (index,)
    return all(isinstance(i, (int, np.integer, slice)) or i is None or i is Ellipsis for i in items)


def _scatter(g: Tensor, index, shape: tuple[int, ...]) -> Tensor:
    out = np.zeros(shape)
    if _is_basic_index(index):
        out[index] += g.data
    else:
        np.add.at(out, index, g.data)
    return Tensor._from_op(out, (g,), (lambda h: getitem(h, index),), "scatter")


def getitem(a: Operand, index) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(
        a.data[index], (a,), (lambda g: _scatter(g, index, a.shape),), "getitem"
    )


def concat(tensors: Sequence[Operand], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    axis = axis % parts[0].ndim
    bounds = np.cumsum([0] + [p.shape[axis] for p in parts])

    def _slicer(lo: int, hi: int) -> Vjp:
        index = (slice(None),) * axis + (slice(lo, hi),)
        return lambda g: getitem(g, index)

    return Tensor._from_op(
        np.concatenate([p.data for p in parts], axis=axis),
        parts,
        [_slicer(int(bounds[i]), int(bounds[i + 1])) for i in range(len(parts))],
        "concat",
    )


def stack(tensors: Sequence[Operand], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    axis = axis % (parts[0].ndim + 1)
    expanded = [reshape(p, p.shape[:axis] + (1,) + p.shape[axis:]) for p in parts]
    return concat(expanded, axis=axis)


# --- 7. Matrixprodukt ---
def matmul(a: Operand, b: Operand) -> Tensor:
    """Batch-Matrixprodukt mit numpy-Broadcasting; beide Operanden mindestens 2-D."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError("matmul erwartet mindestens 2-D Operanden", a.shape, b.shape)
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError("innere Dimensionen passen nicht", a.shape, b.shape)
    return Tensor._from_op(
        np.matmul(a.data, b.data),
        (a, b),
        (
            lambda g: sum_to(matmul(g, swap_last(b)), a.shape),
            lambda g: sum_to(matmul(swap_last(a), g), b.shape),
        ),
        "matmul",
    )


# --- 8. Rückwärtsdurchlauf ---
def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack_: list[tuple[Tensor, bool]] = [(root, False)]
    while stack_:
        node, expanded = stack_.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack_.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack_.append((parent, False))
    return order


def grad(
    output: Tensor,
    inputs: Sequence[Tensor],
    grad_output: Tensor | None = None,
    create_graph: bool = False,
) -> list[Tensor]:
    """
    Gradienten von `output` nach `inputs`.

    Ohne `grad_output` muss `output` skalar sein. Eingaben, die nicht am Graphen
    beteiligt sind, erhalten Nullgradienten.
    """
    if grad_output is None:
        if output.size != 1:
            raise GraphError(f"backward auf nicht-skalarem Wert der Form {output.shape}")
        grad_output = Tensor(np.ones(output.shape))
    grads: dict[int, Tensor] = {id(output): grad_output}
    context = enable_grad() if create_graph else no_grad()
    with context:
        if output.requires_grad:
            for node in reversed(_topological_order(output)):
                g = grads.get(id(node))
                if g is None:
                    continue
                for parent, vjp in zip(node._parents, node._vjps):
                    if not parent.requires_grad:
                        continue
                    contribution = vjp(g)
                    previous = grads.get(id(parent))
                    grads[id(parent)] = contribution if previous is None else add(previous, contribution)
        result = []
        for x in inputs:
            g = grads.get(id(x))
            result.append(g if g is not None else Tensor(np.zeros(x.shape)))
    return result
