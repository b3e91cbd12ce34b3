# -*- coding: utf-8 -*-

"""
Parameterspeicher und Optimierer.

Der `ParamStore` ist ein Single-Writer-Objekt: Gradientenakkumulation und
Optimiererschritte laufen seriell. Rollout-Worker bekommen mit `clone()` eine
schreibgeschützte Momentaufnahme.
"""

from __future__ import annotations

import logging
import math
from typing import Iterator, Literal

import numpy as np

from ..errors import DimensionError, GraphError
from .tensor import Array, Tensor, grad

logger = logging.getLogger(__name__)

Init = Literal["glorot", "zeros", "constant"]


class Parameter(Tensor):
    """Trainierbarer Tensor; nur der Optimierer ersetzt seine Daten."""

    __slots__ = ()

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True, name=name)

    def _assign(self, data: Array) -> None:
        if data.shape != self.data.shape:
            raise DimensionError(f"Zuweisung an {self.name}", self.data.shape, data.shape)
        arr = np.array(data, dtype=np.float64)
        arr.flags.writeable = False
        self.data = arr


class ParamStore:
    """
    Benannte Parameter mit gleichgeformten Gradientenslots.

    `version` steigt mit jedem Optimiererschritt streng monoton.
    """

    def __init__(self, seed: int = 0):
        self._params: dict[str, Parameter] = {}
        self._grads: dict[str, Array] = {}
        self._rng = np.random.default_rng(seed)
        self.version = 0

    # --- Anlegen und Zugriff ---
    def create(self, name: str, shape: tuple[int, ...], init: Init = "glorot", value: float = 0.0) -> Parameter:
        """
        Legt einen Parameter an oder gibt den vorhandenen zurück.

        Glorot-uniform: U(±√(6/(fan_in+fan_out))) mit fan_out = shape[0],
        fan_in = shape[-1]; Biases werden mit Nullen initialisiert.
        """
        if name in self._params:
            existing = self._params[name]
            if existing.shape != tuple(shape):
                raise DimensionError(f"Parameter {name} existiert mit anderer Form", existing.shape, shape)
            return existing
        if init == "glorot":
            fan_out, fan_in = (shape[0], shape[-1]) if len(shape) > 1 else (shape[0], shape[0])
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            data = self._rng.uniform(-limit, limit, size=shape)
        elif init == "zeros":
            data = np.zeros(shape)
        else:
            data = np.full(shape, float(value))
        param = Parameter(data, name=name)
        self._params[name] = param
        self._grads[name] = np.zeros(shape)
        return param

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def items(self) -> Iterator[tuple[str, Parameter]]:
        return iter(self._params.items())

    def grad(self, name: str) -> Array:
        return self._grads[name]

    def n_parameters(self) -> int:
        return int(sum(p.size for p in self._params.values()))

    # --- Gradienten ---
    def zero_grad(self) -> None:
        for name in self._grads:
            self._grads[name] = np.zeros_like(self._grads[name])

    def backward(self, loss: Tensor) -> None:
        """Akkumuliert ∂loss/∂p in die Gradientenslots; unbeteiligte Parameter erhalten 0."""
        if loss.size != 1:
            raise GraphError(f"backward auf nicht-skalarem Verlust der Form {loss.shape}")
        names = list(self._params)
        grads = grad(loss, [self._params[n] for n in names])
        for name, g in zip(names, grads):
            self._grads[name] = self._grads[name] + g.data

    def grad_norm(self) -> float:
        return float(math.sqrt(sum(float(np.sum(g * g)) for g in self._grads.values())))

    # --- Zustand ---
    def state_dict(self) -> dict[str, Array]:
        return {name: p.data.copy() for name, p in self._params.items()}

    def load_state_dict(self, state: dict[str, Array], strict: bool = True) -> None:
        if strict:
            missing = sorted(set(self._params) - set(state))
            unexpected = sorted(set(state) - set(self._params))
            if missing or unexpected:
                raise DimensionError(f"Zustand passt nicht: fehlend={missing}, unerwartet={unexpected}")
        for name, value in state.items():
            if name in self._params:
                self._params[name]._assign(np.asarray(value, dtype=np.float64))
            else:
                self._params[name] = Parameter(value, name=name)
                self._grads[name] = np.zeros_like(self._params[name].data)

    def clone(self) -> "ParamStore":
        """Unabhängige Kopie der Parameterwerte (Gradienten leer)."""
        other = ParamStore()
        for name, p in self._params.items():
            other._params[name] = Parameter(p.data.copy(), name=name)
            other._grads[name] = np.zeros_like(p.data)
        other.version = self.version
        return other

    def _bump_version(self) -> None:
        self.version += 1


class Adam:
    """
    Adaptive-Moment-Gradientenabstieg über alle Parameter eines Stores.

    Standardwerte: Schrittweite 4e-5, Momente 0.9/0.999, epsilon 1e-8.
    """

    def __init__(
        self,
        store: ParamStore,
        lr: float = 4e-5,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        max_grad_norm: float | None = None,
    ):
        self.store = store
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.max_grad_norm = max_grad_norm
        self._m: dict[str, Array] = {}
        self._v: dict[str, Array] = {}
        self._t = 0

    def step(self) -> None:
        self._t += 1
        scale = 1.0
        if self.max_grad_norm is not None:
            norm = self.store.grad_norm()
            if norm > self.max_grad_norm:
                scale = self.max_grad_norm / (norm + 1e-12)
        for name, param in self.store.items():
            g = self.store.grad(name) * scale
            m = self._m.get(name, np.zeros_like(g))
            v = self._v.get(name, np.zeros_like(g))
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g * g
            self._m[name], self._v[name] = m, v
            m_hat = m / (1.0 - self.beta1**self._t)
            v_hat = v / (1.0 - self.beta2**self._t)
            param._assign(param.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps))
        self.store._bump_version()
