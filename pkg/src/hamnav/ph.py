# -*- coding: utf-8 -*-

"""
Port-Hamilton-Algebra des Roboters.

Ein PH-System hat die Form

    ẋ = (J − R)·∇H(x) + G·u,     y = Gᵀ·∇H(x)

mit schiefsymmetrischem J, positiv semidefinitem R und Energie H. Dieses Modul
enthält die Open-Loop-Dynamik, die Leistungsbilanz, die Synthese des
energiebilanzierenden passivitätsbasierten Reglers (EB-PBC), den paarweisen
PH-Policy-Kopf und die Diskretisierung auf den RL-Zeitschritt.

Alle Funktionen sind reine Funktionen über Werttypen. `open_loop_dynamics`,
`ph_policy_head` und `discretize_step` akzeptieren neben numpy-Arrays auch
`hamnav.nn.Tensor`-Operanden, damit die Policy durch sie hindurch differenziert.
"""

# --- 1. Importe ---
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, IntegrationError, MissingPairBlockError, PHStructureError, SingularityError

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

SKEW_TOL = 1e-12
PSD_TOL = 1e-10
MAX_CONDITION = 1e12


# --- 2. Hilfsfunktionen ---
def skew_part(a: ArrayLike) -> Array:
    """(A − Aᵀ)/2; das Ergebnis ist exakt schiefsymmetrisch."""
    a = np.asarray(a, dtype=np.float64)
    return (a - np.swapaxes(a, -1, -2)) / 2.0


def psd_project(r: ArrayLike) -> Array:
    """Symmetrisiert und schneidet negative Eigenwerte bei 0 ab."""
    r = np.asarray(r, dtype=np.float64)
    sym = (r + np.swapaxes(r, -1, -2)) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    clipped = (eigvecs * np.clip(eigvals, 0.0, None)[..., None, :]) @ np.swapaxes(eigvecs, -1, -2)
    return (clipped + np.swapaxes(clipped, -1, -2)) / 2.0


def _col(v: Any) -> Any:
    return v[..., None]


def _uncol(v: Any) -> Any:
    return v[..., 0]


def _values(v: Any) -> Array:
    return np.asarray(getattr(v, "data", v))


# --- 3. Werttypen ---
@dataclass(frozen=True)
class PHTerms:
    """
    Das Quadrupel (J, R, ∇H, G) samt Energie H, ausgewertet in einem Zustand.

    Führende Batchachsen sind erlaubt (J: [..., n, n], grad_h: [..., n], H: [...]).
    """

    J: Array
    R: Array
    grad_h: Array
    H: Array
    G: Array

    def __post_init__(self) -> None:
        for name in ("J", "R", "grad_h", "H", "G"):
            value = np.asarray(getattr(self, name), dtype=np.float64)
            if not np.isfinite(value).all():
                raise DimensionError(f"PHTerms.{name} enthält nicht-endliche Werte", value.shape)
            object.__setattr__(self, name, value)
        n = self.grad_h.shape[-1]
        if self.J.shape[-2:] != (n, n) or self.R.shape[-2:] != (n, n):
            raise DimensionError("J und R müssen n×n sein", self.J.shape, self.R.shape, self.grad_h.shape)
        if self.G.ndim < 2 or self.G.shape[-2] != n or self.G.shape[-1] > n:
            raise DimensionError("G muss n×m mit m ≤ n sein", self.G.shape, self.grad_h.shape)
        if np.max(np.abs(self.J + np.swapaxes(self.J, -1, -2)), initial=0.0) > SKEW_TOL:
            raise PHStructureError("J ist nicht schiefsymmetrisch")
        if np.max(np.abs(self.R - np.swapaxes(self.R, -1, -2)), initial=0.0) > SKEW_TOL:
            raise PHStructureError("R ist nicht symmetrisch")
        if np.min(np.linalg.eigvalsh(self.R), initial=0.0) < -PSD_TOL:
            raise PHStructureError("R ist nicht positiv semidefinit")

    @classmethod
    def build(cls, J: ArrayLike, R: ArrayLike, grad_h: ArrayLike, H: ArrayLike, G: ArrayLike) -> "PHTerms":
        """Erzwingt Schiefsymmetrie von J und Semidefinitheit von R per Konstruktion."""
        return cls(J=skew_part(J), R=psd_project(R), grad_h=np.asarray(grad_h, float), H=np.asarray(H, float), G=np.asarray(G, float))

    @property
    def n(self) -> int:
        return self.grad_h.shape[-1]

    @property
    def m(self) -> int:
        return self.G.shape[-1]

    def output(self) -> Array:
        """Ausgangsport y = Gᵀ·∇H."""
        return _uncol(np.swapaxes(self.G, -1, -2) @ _col(self.grad_h))

    def drift(self) -> Array:
        """(J − R)·∇H."""
        return _uncol((self.J - self.R) @ _col(self.grad_h))


@dataclass(frozen=True)
class NominalSystem:
    """
    Nominale Roboterstrecke: Punktmasse mit Federpotential zum Ziel.

    Zustand x = (p, π) mit Impuls π = m·v, H = ‖π‖²/(2m) + ½·k·‖p − goal‖²,
    J = [[0, I], [−I, 0]], R = c·diag(0, I), G = [0; I].
    """

    mass: float = 1.0
    goal: Array = field(default_factory=lambda: np.zeros(2))
    stiffness: float = 0.0
    damping: float = 0.0

    def __post_init__(self) -> None:
        if self.mass <= 0:
            raise PHStructureError(f"Masse muss positiv sein, ist {self.mass}")
        if self.stiffness < 0 or self.damping < 0:
            raise PHStructureError("Steifigkeit und Dämpfung müssen ≥ 0 sein")
        object.__setattr__(self, "goal", np.asarray(self.goal, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.goal.shape[-1]

    def state(self, position: ArrayLike, velocity: ArrayLike) -> Array:
        """Baut x = (p, m·v)."""
        p, v = np.asarray(position, float), np.asarray(velocity, float)
        return np.concatenate([p, self.mass * v], axis=-1)

    def velocity(self, x: ArrayLike) -> Array:
        x = np.asarray(x, float)
        return x[..., self.dim :] / self.mass

    def hamiltonian(self, x: ArrayLike) -> Array:
        x = np.asarray(x, float)
        p, momentum = x[..., : self.dim], x[..., self.dim :]
        offset = p - self.goal
        return 0.5 * np.sum(momentum * momentum, axis=-1) / self.mass + 0.5 * self.stiffness * np.sum(offset * offset, axis=-1)

    def gradient(self, x: ArrayLike) -> Array:
        x = np.asarray(x, float)
        p, momentum = x[..., : self.dim], x[..., self.dim :]
        return np.concatenate([self.stiffness * (p - self.goal), momentum / self.mass], axis=-1)

    def terms(self, x: ArrayLike) -> PHTerms:
        d = self.dim
        eye, zero = np.eye(d), np.zeros((d, d))
        J = np.block([[zero, eye], [-eye, zero]])
        R = np.block([[zero, zero], [zero, self.damping * eye]])
        G = np.vstack([zero, eye])
        x = np.asarray(x, float)
        batch = x.shape[:-1]
        return PHTerms(
            J=np.broadcast_to(J, batch + J.shape),
            R=np.broadcast_to(R, batch + R.shape),
            grad_h=self.gradient(x),
            H=self.hamiltonian(x),
            G=np.broadcast_to(G, batch + G.shape),
        )


@dataclass(frozen=True)
class DampingMatrix:
    """Matrix D der Dämpfungsinjektion, u = G†(J_d − R_d)∇H_d − D·y."""

    D: Array

    def __post_init__(self) -> None:
        value = np.asarray(self.D, dtype=np.float64)
        if not np.isfinite(value).all():
            raise PHStructureError("D enthält nicht-endliche Werte")
        object.__setattr__(self, "D", value)


@dataclass(frozen=True)
class PowerBalance:
    hdot: Array
    supplied: Array
    dissipated: Array


@dataclass(frozen=True)
class PairwiseTerms:
    """
    Gelernte PH-Blöcke über Agentenpaare.

    J_blocks, R_blocks: [..., N, N, n, n]; grad_h: [..., N, n]. Einträge dürfen
    `Tensor` sein. `visible` markiert Agenten, deren Blöcke in die Summe eingehen.
    """

    J_blocks: Any
    R_blocks: Any
    grad_h: Any
    visible: NDArray[np.bool_] | None = None

    @property
    def n_agents(self) -> int:
        return min(self.J_blocks.shape[-3], self.R_blocks.shape[-3], self.grad_h.shape[-2])


# --- 4. Operationen ---
def open_loop_dynamics(x: Any, u: Any, terms: PHTerms) -> Any:
    """ẋ = (J − R)·∇H + G·u; den Ausgang y liefert `terms.output()`."""
    if x.shape[-1] != terms.n:
        raise DimensionError("Zustand passt nicht zu den PH-Termen", x.shape, terms.grad_h.shape)
    if u.shape[-1] != terms.m:
        raise DimensionError("Eingang passt nicht zu G", u.shape, terms.G.shape)
    return terms.drift() + _uncol(terms.G @ _col(u))


def power_balance(x: ArrayLike, u: ArrayLike, terms: PHTerms) -> PowerBalance:
    """Ḣ = −∇Hᵀ·R·∇H + uᵀy, getrennt nach zugeführter und dissipierter Leistung."""
    x, u = np.asarray(x, float), np.asarray(u, float)
    if x.shape[-1] != terms.n or u.shape[-1] != terms.m:
        raise DimensionError("power_balance: Dimensionen passen nicht", x.shape, u.shape, terms.G.shape)
    g = terms.grad_h
    dissipated = np.sum(g * _uncol(terms.R @ _col(g)), axis=-1)
    supplied = np.sum(u * terms.output(), axis=-1)
    return PowerBalance(hdot=supplied - dissipated, supplied=supplied, dissipated=dissipated)


def pseudo_inverse(G: ArrayLike) -> Array:
    """G† = (GᵀG)⁻¹Gᵀ für G mit vollem Spaltenrang."""
    G = np.asarray(G, dtype=np.float64)
    if G.ndim < 2 or G.shape[-1] > G.shape[-2]:
        raise DimensionError("pseudo_inverse erwartet ein hohes oder quadratisches G", G.shape)
    singular = np.linalg.svd(G, compute_uv=False)
    smallest = float(np.min(singular))
    largest = float(np.max(singular))
    if smallest <= 0.0 or (largest / smallest) ** 2 > MAX_CONDITION:
        raise SingularityError("GᵀG ist singulär oder schlecht konditioniert", smallest)
    Gt = np.swapaxes(G, -1, -2)
    return np.linalg.solve(Gt @ G, Gt)


def damping_injection_matrix(nominal: PHTerms) -> DampingMatrix:
    """D = (GᵀG)⁻¹(J − R); nur für quadratisches G (n = m) definiert."""
    if nominal.n != nominal.m:
        raise DimensionError("D ist nur für n = m definiert", nominal.G.shape)
    Gt = np.swapaxes(nominal.G, -1, -2)
    return DampingMatrix(np.linalg.solve(Gt @ nominal.G, nominal.J - nominal.R))


def damping_injection_form(x: ArrayLike, nominal: PHTerms, desired: PHTerms) -> Array:
    """Erste Schreibweise des EB-PBC-Gesetzes: u = G†(J_d − R_d)∇H_d − D·y."""
    D = damping_injection_matrix(nominal).D
    return _uncol(pseudo_inverse(nominal.G) @ _col(desired.drift())) - _uncol(D @ _col(nominal.output()))


def ebpbc_policy(x: ArrayLike, nominal: PHTerms, desired: PHTerms) -> Array:
    """
    u = G†[(J_d − R_d)∇H_d − (J − R)∇H].

    Bei quadratischem, invertierbarem G ist die Zuordnung exakt, sonst eine
    Kleinste-Quadrate-Projektion; das Residuum wird protokolliert.
    """
    if nominal.G.shape != desired.G.shape or np.max(np.abs(nominal.G - desired.G), initial=0.0) > SKEW_TOL:
        raise DimensionError("nominales und gewünschtes System brauchen dasselbe G", nominal.G.shape, desired.G.shape)
    x = np.asarray(x, float)
    target = desired.drift()
    u = _uncol(pseudo_inverse(nominal.G) @ _col(target - nominal.drift()))
    if logger.isEnabledFor(logging.DEBUG):
        residual = float(np.linalg.norm(open_loop_dynamics(x, u, nominal) - target))
        logger.debug("EB-PBC Residuum ‖f_PH(x,u) − (J_d − R_d)∇H_d‖ = %.3e", residual)
    return u


def ph_policy_head(x_all: Any, theta: PairwiseTerms, nominal: PHTerms, robot: int = 0) -> Any:
    """
    u = G†(Σ_n ([J_θ]_rn − [R_θ]_rn)·∇_{x_n}H_θ − (J − R)·∇_{x_r}H).

    `x_all` hat die Form [..., N, n]; die Summe läuft über alle sichtbaren
    Agenten einschließlich des Roboters selbst.
    """
    n_agents = x_all.shape[-2]
    visible = np.ones(n_agents, dtype=bool) if theta.visible is None else np.asarray(theta.visible, bool)
    if visible.shape[-1] != n_agents:
        raise DimensionError("Sichtbarkeitsmaske passt nicht zu x_all", visible.shape, x_all.shape)
    available = theta.n_agents
    if available < n_agents:
        missing = [int(i) for i in np.flatnonzero(np.any(visible.reshape(-1, n_agents), axis=0)) if i >= available]
        if missing:
            raise MissingPairBlockError(missing)
    if x_all.shape[-1] != nominal.n:
        raise DimensionError("Agentenzustand passt nicht zum nominalen System", x_all.shape, nominal.grad_h.shape)

    weight = visible.astype(np.float64)[..., :, None, None]
    blocks = (theta.J_blocks[..., robot, :n_agents, :, :] - theta.R_blocks[..., robot, :n_agents, :, :]) * weight
    coupled = _uncol(blocks @ _col(theta.grad_h[..., :n_agents, :])).sum(axis=-2)
    return _uncol(pseudo_inverse(nominal.G) @ _col(coupled - nominal.drift()))


def discretize_step(s: Any, a: Any, T: float, dynamics: Callable[[Any, Any], Any]) -> Any:
    """s_{t+1} = s_t + T·f(s_t, a_t) mit über [t, t+T) konstant gehaltenem a."""
    if not T > 0:
        raise IntegrationError(f"Zeitschritt muss positiv sein, ist {T}")
    derivative = dynamics(s, a)
    if not np.isfinite(_values(derivative)).all():
        raise IntegrationError("nicht-endliche Zustandsableitung")
    return s + derivative * T
