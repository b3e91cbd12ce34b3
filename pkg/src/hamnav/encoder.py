# -*- coding: utf-8 -*-

"""
Räumlich-zeitlicher Attention-Encoder und die Köpfe der gelernten
Hamilton-Terme.

Ablauf für ein Beobachtungsfenster [N Agenten × T Schritte × 8 Merkmale]:

1. Einbettung jedes Tokens auf Breite d.
2. Räumliche Attention über die Agenten je Zeitschritt -> Y_S.
3. Zeitliche Attention über die Schritte je Agent (kausal) -> Y_T.
4. Fusion: je (Agent, Schritt) Attention über die beiden Modalitätstoken
   (Y_S, Y_T), gemittelt -> Y_F.
5. Paarmerkmale F_R^ij = mean_t((W_a·Y_F[i,t]) ⊙ (W_b·Y_F[j,t])).

Die Köpfe bauen daraus schiefsymmetrische J_θ-Blöcke, diagonal dominante
(und damit positiv semidefinite) R_θ-Blöcke und die Energie H_θ, deren
Gradient nach den Rohzuständen (p, v) per Rückwärtsdifferentiation entsteht.
Alle Operationen erlauben eine führende Batchachse.
"""

# --- 1. Importe ---
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .config import EncoderConfig
from .errors import DimensionError, NonFiniteError, StateError
from .nn import tensor as T
from .nn.layers import MLP, Linear, Module, TransformerBlock
from .nn.params import ParamStore
from .nn.tensor import Tensor, enable_grad, grad
from .ph import PairwiseTerms

Array = NDArray[np.float64]

D_IN = 8
STATE_DIM = 4
PREFIX = "encoder"

# Spalten der Rohmerkmale (Roboter: p, v, ρ, g, v_pref; Fußgänger: p, v, ρ, Nullen)
POS = slice(0, 2)
VEL = slice(2, 4)
GOAL = slice(5, 7)


# --- 2. Datentypen ---
@dataclass(frozen=True)
class ObservationWindow:
    """
    Die letzten T Beobachtungen aller Agenten.

    entries: [..., N, T, 8], Agent 0 ist der Roboter; fehlende Agenten sind
    mit Nullen aufgefüllt und in `present` als False markiert.
    """

    entries: Array
    present: NDArray[np.bool_]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.float64)
        present = np.asarray(self.present, dtype=bool)
        if entries.ndim < 3 or entries.shape[-1] != D_IN:
            raise DimensionError("ObservationWindow erwartet [..., N, T, 8]", entries.shape)
        n_agents, steps = entries.shape[-3], entries.shape[-2]
        if n_agents < 1:
            raise DimensionError("ObservationWindow braucht mindestens einen Agenten", entries.shape)
        if steps < 1:
            raise DimensionError("ObservationWindow braucht mindestens einen Zeitschritt", entries.shape)
        if present.shape != entries.shape[:-2]:
            raise DimensionError("Maske passt nicht zum Fenster", present.shape, entries.shape)
        if not present[..., 0].all():
            raise StateError("Agent 0 (Roboter) muss vorhanden sein")
        if np.any(entries[~present] != 0.0):
            raise StateError("fehlende Agenten müssen mit Nullen aufgefüllt sein")
        if not np.isfinite(entries).all():
            raise NonFiniteError("ObservationWindow enthält nicht-endliche Werte")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "present", present)

    @property
    def n_agents(self) -> int:
        return self.entries.shape[-3]

    @property
    def steps(self) -> int:
        return self.entries.shape[-2]

    def states(self) -> Array:
        """Rohzustände (p, v) im letzten Schritt, [..., N, 4]."""
        return self.entries[..., -1, :STATE_DIM]

    def robot_goal(self) -> Array:
        return self.entries[..., 0, -1, GOAL]

    @classmethod
    def stack(cls, windows: list["ObservationWindow"]) -> "ObservationWindow":
        return cls(np.stack([w.entries for w in windows]), np.stack([w.present for w in windows]))


@dataclass(frozen=True)
class FusedFeatures:
    Y_S: Tensor
    Y_T: Tensor
    Y_F: Tensor
    F_R: Tensor


@dataclass(frozen=True)
class LearnedHamiltonian:
    """
    Gelernte PH-Terme über Agentenpaare.

    J_blocks, R_blocks: [..., N, N, 4, 4]; E, U, H: [...]; grad_h: [..., N, 4].
    """

    J_blocks: Tensor
    R_blocks: Tensor
    E: Tensor
    U: Tensor
    H: Tensor
    grad_h: Tensor
    present: NDArray[np.bool_]

    def as_pairwise(self) -> PairwiseTerms:
        return PairwiseTerms(self.J_blocks, self.R_blocks, self.grad_h, visible=self.present)


def assemble_blocks(blocks: Tensor | Array) -> Array:
    """[N, N, n, n]-Blöcke als dichte [N·n × N·n]-Matrix."""
    b = np.asarray(getattr(blocks, "data", blocks))
    n_agents, _, n, _ = b.shape
    return b.transpose(0, 2, 1, 3).reshape(n_agents * n, n_agents * n)


def _time_encoding(steps: int, width: int) -> Array:
    position = np.arange(steps)[:, None]
    freq = np.exp(-np.log(10_000.0) * (np.arange(0, width, 2) / width))
    enc = np.zeros((steps, width))
    enc[:, 0::2] = np.sin(position * freq)
    enc[:, 1::2] = np.cos(position * freq)[:, : width // 2]
    return enc


# --- 3. Encoder ---
class STEncoder(Module):
    """Räumlich-zeitlicher Encoder samt Hamilton-Köpfen."""

    def __init__(self, store: ParamStore, config: EncoderConfig = EncoderConfig(), prefix: str = PREFIX):
        super().__init__(store, prefix)
        d, heads = config.d_model, config.n_heads
        self.config = config
        self.embed = Linear(store, f"{prefix}.embed", D_IN, d)
        self.spatial = TransformerBlock(store, f"{prefix}.spatial", d, heads)
        self.temporal = TransformerBlock(store, f"{prefix}.temporal", d, heads)
        self.fusion = TransformerBlock(store, f"{prefix}.fusion", d, heads)
        self.pair_a = Linear(store, f"{prefix}.pair_a", d, d, bias=False)
        self.pair_b = Linear(store, f"{prefix}.pair_b", d, d, bias=False)
        # Köpfe
        self.f_R = MLP(store, f"{prefix}.f_R", [d, config.head_hidden, STATE_DIM])
        self.f_R_self = MLP(store, f"{prefix}.f_R_self", [d, config.head_hidden, STATE_DIM])
        self.proj_K = Linear(store, f"{prefix}.proj_K", d, d)
        self.proj_M = Linear(store, f"{prefix}.proj_M", d, d)
        self.f_J = MLP(store, f"{prefix}.f_J", [d, config.head_hidden, STATE_DIM * STATE_DIM])
        self.W_E = Linear(store, f"{prefix}.W_E", d + 2, config.energy_width, bias=False)
        self.W_U = Linear(store, f"{prefix}.W_U", d + 2, config.energy_width, bias=False)

    # --- Merkmale ---
    def encode(self, window: ObservationWindow) -> FusedFeatures:
        n_agents, steps = window.n_agents, window.steps
        present = window.present
        batch = window.entries.shape[:-3]
        nb = len(batch)
        x = self.embed(window.entries) + _time_encoding(steps, self.config.d_model)

        # Räumlich: [..., T, N, d]; fehlende Agenten sehen nur sich selbst.
        spatial_mask = present[..., None, None, :] | np.eye(n_agents, dtype=bool)
        x_s = T.transpose(x, (*range(nb), nb + 1, nb, nb + 2))
        y_s = self.spatial(x_s, spatial_mask)
        y_s = T.transpose(y_s, (*range(nb), nb + 1, nb, nb + 2))

        # Zeitlich, kausal: [..., N, T, d]
        causal = np.tril(np.ones((steps, steps), dtype=bool))
        y_t = self.temporal(x, causal)

        # Fusion über die beiden Modalitätstoken
        tokens = T.stack([y_s, y_t], axis=-2)
        y_f = T.mean(self.fusion(tokens), axis=-2)

        a = self.pair_a(y_f)
        b = self.pair_b(y_f)
        d = self.config.d_model
        a = T.reshape(a, (*batch, n_agents, 1, steps, d))
        b = T.reshape(b, (*batch, 1, n_agents, steps, d))
        f_r = T.mean(a * b, axis=-2)
        return FusedFeatures(Y_S=y_s, Y_T=y_t, Y_F=y_f, F_R=f_r)

    # --- Köpfe ---
    def _swap_agents(self, t: Tensor, trailing: int) -> Tensor:
        nb = t.ndim - 2 - trailing
        return T.transpose(t, (*range(nb), nb + 1, nb, *range(nb + 2, t.ndim)))

    def dissipation_blocks(self, f_r: Tensor, present: NDArray[np.bool_]) -> Tensor:
        """
        Außerdiagonal: ς(f_R(−(F^ij + F^ji))), diagonal: ς(f_R_self(F^ii)) + Σ_j R_ij,
        mit ς(z) = z². Jeder Block ist diagonal.
        """
        n_agents = f_r.shape[-2]
        eye = np.eye(n_agents)
        pair = (present[..., :, None] & present[..., None, :]).astype(np.float64)
        symmetric = -(f_r + self._swap_agents(f_r, 1))
        off = T.square(self.f_R(symmetric)) * ((1.0 - eye) * pair)[..., None]
        f_self = T.sum_(f_r * eye[..., None], axis=-2)
        own = (T.square(self.f_R_self(f_self)) + T.sum_(off, axis=-2)) * present.astype(np.float64)[..., None]
        entries = off + T.reshape(own, (*own.shape[:-2], n_agents, 1, STATE_DIM)) * eye[..., None]
        return T.reshape(entries, (*entries.shape, 1)) * np.eye(STATE_DIM)

    def interconnection_blocks(self, f_r: Tensor, present: NDArray[np.bool_]) -> Tensor:
        """A_ij = f_J(F_K^ij − F_M^ji), J_ij = (A_ij − A_jiᵀ)/2."""
        pair = (present[..., :, None] & present[..., None, :]).astype(np.float64)
        raw = self.proj_K(f_r) - self._swap_agents(self.proj_M(f_r), 1)
        a = self.f_J(raw)
        a = T.reshape(a, (*a.shape[:-1], STATE_DIM, STATE_DIM))
        a_t = T.swap_last(self._swap_agents(a, 2))
        return (a - a_t) * 0.5 * pair[..., None, None]

    def energy(self, context: Tensor, states: Tensor, goal: Array, present: NDArray[np.bool_]) -> tuple[Tensor, Tensor]:
        """E = Σ_n ½‖W_E[c_n; v_n]‖², U = Σ_n ½‖W_U[c_n; p_n − g_r]‖²."""
        weight = present.astype(np.float64)
        offset = states[..., POS] - np.asarray(goal)[..., None, :]
        kinetic = self.W_E(T.concat([context, states[..., VEL]], axis=-1))
        potential = self.W_U(T.concat([context, offset], axis=-1))
        E = T.sum_(T.sum_(T.square(kinetic), axis=-1) * weight, axis=-1) * 0.5
        U = T.sum_(T.sum_(T.square(potential), axis=-1) * weight, axis=-1) * 0.5
        return E, U

    def hamiltonian_heads(self, features: FusedFeatures, window: ObservationWindow, create_graph: bool = False) -> LearnedHamiltonian:
        """
        Gelernte Terme aus den Paarmerkmalen. `create_graph=True` hält ∇ₓH_θ
        differenzierbar nach den Parametern (Training).
        """
        present = window.present
        R_blocks = self.dissipation_blocks(features.F_R, present)
        J_blocks = self.interconnection_blocks(features.F_R, present)
        context = T.mean(features.Y_F, axis=-2).detach()
        with enable_grad():
            states = Tensor(window.states(), requires_grad=True)
            E, U = self.energy(context, states, window.robot_goal(), present)
            H = E + U
            (grad_h,) = grad(T.sum_(H), [states], create_graph=create_graph)
        return LearnedHamiltonian(J_blocks=J_blocks, R_blocks=R_blocks, E=E, U=U, H=H, grad_h=grad_h, present=present)

    def __call__(self, window: ObservationWindow, create_graph: bool = False) -> tuple[FusedFeatures, LearnedHamiltonian]:
        features = self.encode(window)
        return features, self.hamiltonian_heads(features, window, create_graph)
