# -*- coding: utf-8 -*-

"""
Leapfrog-Diffusionskopf über der PH-Aktion.

Vorwärts wird die Aktion nach einem linearen Rauschfahrplan verrauscht. Statt
alle K Rückwärtsschritte zu gehen, schätzt ein gelernter Initialisierer die
Verteilung bei Schritt κ (Mittel μ_θ, Streuung σ_θ, Form ℂ_τ) und erzeugt
𝒯 Kandidaten, die anschließend nur κ Schritte bedingt entrauscht werden.

Indexkonvention: `alphas` ist nullbasiert; der 1-basierte Schritt k liest
`alphas[k-1]` bzw. `alpha_bar[k-1]`.
"""

# --- 1. Importe ---
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import DiffusionConfig
from .errors import DimensionError, SamplingError, ScheduleError
from .nn import tensor as T
from .nn.layers import MLP, Module
from .nn.params import ParamStore
from .nn.tensor import Tensor

Array = NDArray[np.float64]
ACTION_DIM = 2
CONDITION_DIM = 5
PREFIX = "diffusion"


# --- 2. Fahrplan ---
@dataclass(frozen=True)
class DiffusionSchedule:
    K: int
    kappa: int
    alphas: Array
    T_candidates: int

    def __post_init__(self) -> None:
        alphas = np.asarray(self.alphas, dtype=np.float64)
        if alphas.shape != (self.K,):
            raise ScheduleError(f"alphas braucht Länge K={self.K}, hat {alphas.shape}")
        if not (np.all(alphas > 0) and np.all(alphas < 1)):
            raise ScheduleError("alle alphas müssen in (0, 1) liegen")
        if not 1 <= self.kappa <= self.K:
            raise ScheduleError(f"kappa={self.kappa} außerhalb von [1, {self.K}]")
        if self.T_candidates < 1:
            raise ScheduleError("T_candidates muss ≥ 1 sein")
        alphas.flags.writeable = False
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def linear(cls, K: int = 100, kappa: int = 5, start: float = 1e-4, end: float = 0.05, T_candidates: int = 20) -> "DiffusionSchedule":
        return cls(K=K, kappa=kappa, alphas=np.linspace(start, end, K), T_candidates=T_candidates)

    @classmethod
    def from_config(cls, config: DiffusionConfig) -> "DiffusionSchedule":
        return cls.linear(config.K, config.kappa, config.alpha_start, config.alpha_end, config.T_candidates)

    @property
    def alpha_bar(self) -> Array:
        return np.cumprod(1.0 - self.alphas)

    def _check(self, k: int, upper: int, what: str) -> None:
        if not 1 <= k <= upper:
            raise ScheduleError(f"{what}={k} außerhalb von [1, {upper}]")


# --- 3. Vorwärtsprozess ---
def forward_noise(u0: ArrayLike, k: int, schedule: DiffusionSchedule, noise: ArrayLike) -> Array:
    """Randverteilung q(u^k | u^0): √ᾱ_k·u0 + √(1−ᾱ_k)·noise."""
    schedule._check(k, schedule.K, "k")
    abar = schedule.alpha_bar[k - 1]
    return math.sqrt(abar) * np.asarray(u0, float) + math.sqrt(1.0 - abar) * np.asarray(noise, float)


def forward_step(u_prev: ArrayLike, k: int, schedule: DiffusionSchedule, noise: ArrayLike) -> Array:
    """Ein einzelner Kern q(u^k | u^{k−1}) = N(√(1−α_k)·u^{k−1}, α_k·I)."""
    schedule._check(k, schedule.K, "k")
    a = schedule.alphas[k - 1]
    return math.sqrt(1.0 - a) * np.asarray(u_prev, float) + math.sqrt(a) * np.asarray(noise, float)


# --- 4. Rückwärtsprozess ---
def reverse_step(u_hat: Any, omega: int, eps: Any, schedule: DiffusionSchedule, noise: ArrayLike) -> Any:
    """
    (1/√(1−α))·(û − α/√(1−ᾱ)·ε) + √α·η mit α, ᾱ des Schritts ω; η = 0 bei ω = 1.
    Akzeptiert `Tensor` für û und ε.
    """
    schedule._check(omega, schedule.kappa, "omega")
    a = schedule.alphas[omega - 1]
    abar = schedule.alpha_bar[omega - 1]
    out = (u_hat - eps * (a / math.sqrt(1.0 - abar))) * (1.0 / math.sqrt(1.0 - a))
    if omega > 1:
        out = out + np.asarray(noise, float) * math.sqrt(a)
    return out


def step_embedding(omega: int, width: int) -> Array:
    half = width // 2
    freq = np.exp(-np.log(1000.0) * np.arange(half) / max(half, 1))
    emb = np.concatenate([np.sin(omega * freq), np.cos(omega * freq)])
    return np.pad(emb, (0, width - emb.size))


def condition_vector(goal_offset: ArrayLike, social_distance: float, n_static: int, nearest_static: float) -> Array:
    """I_C = (g − p Roboter, bevorzugte soziale Distanz, Anzahl statischer Hindernisse, nächste Distanz)."""
    goal_offset = np.asarray(goal_offset, dtype=np.float64)
    nearest = nearest_static if n_static > 0 and math.isfinite(nearest_static) else 0.0
    cond = np.concatenate([goal_offset, [social_distance, float(n_static), nearest]])
    if cond.shape[-1] != CONDITION_DIM or not np.isfinite(cond).all():
        raise DimensionError("Bedingungsvektor ungültig", cond.shape)
    return cond


# --- 5. Auswahl ---
def clip_norm(action: Any, v_pref: float) -> Any:
    """Skaliert Aktionen mit ‖a‖ > v_pref auf den Rand; differenzierbar für `Tensor`."""
    values = np.asarray(getattr(action, "data", action))
    norms = np.linalg.norm(values, axis=-1, keepdims=True)
    over = norms > v_pref
    if not over.any():
        return action
    if isinstance(action, Tensor):
        length = T.sqrt(T.sum_(action * action, axis=-1, keepdims=True) + 1e-300)
        scale = (v_pref / length) * over + (1.0 - over)
        return action * scale
    return np.where(over, values * (v_pref / np.maximum(norms, 1e-300)), values)


def sample_policy(candidates: Any, mode: Literal["train", "eval"], v_pref: float, rng: np.random.Generator | None = None) -> Any:
    """Trainingsmodus: gleichverteilte Wahl; Auswertung: Kandidatenmittel. Danach ‖a‖ ≤ v_pref."""
    if candidates.shape[-2] == 0:
        raise DimensionError("leere Kandidatenmenge", candidates.shape)
    if mode == "eval":
        chosen = T.mean(candidates, axis=-2) if isinstance(candidates, Tensor) else np.mean(candidates, axis=-2)
    elif mode == "train":
        if rng is None:
            raise SamplingError("Trainingsmodus braucht einen Zufallsgenerator")
        index = rng.integers(candidates.shape[-2])
        chosen = candidates[..., index, :]
    else:
        raise SamplingError(f"unbekannter Modus {mode!r}")
    return clip_norm(chosen, v_pref)


# --- 6. Netzwerk ---
class LeapfrogDiffusion(Module):
    """
    Initialisierer (f_μ, f_σ, f_ℂ) und Rauschschätzer ε_θ(û, ω | I_C).

    μ_θ wird residual um u_ph gelernt, sodass ein frisch initialisierter Kopf
    nahe der PH-Aktion startet.
    """

    def __init__(self, store: ParamStore, config: DiffusionConfig, context_dim: int, prefix: str = PREFIX):
        super().__init__(store, prefix)
        self.config = config
        self.schedule = DiffusionSchedule.from_config(config)
        hidden = config.eps_hidden
        self.f_mu = MLP(store, f"{prefix}.f_mu", [ACTION_DIM + context_dim, hidden, ACTION_DIM])
        self.f_sigma = MLP(store, f"{prefix}.f_sigma", [ACTION_DIM, hidden, ACTION_DIM])
        self.f_shape = MLP(store, f"{prefix}.f_C", [3 * ACTION_DIM, hidden, ACTION_DIM])
        self.f_eps = MLP(store, f"{prefix}.f_eps", [ACTION_DIM + config.step_embedding + CONDITION_DIM, hidden, hidden, ACTION_DIM])

    def leapfrog_init(self, u_ph: Any, context: Any, noise: ArrayLike) -> tuple[Tensor, Tensor, Tensor]:
        """
        Kandidaten ũ^κ_τ = μ_θ + σ_θ·ℂ_τ, τ = 1…𝒯.

        u_ph: [..., 2], context: [..., c], noise: [..., 𝒯, 2]. Rückgabe
        (Kandidaten [..., 𝒯, 2], μ_θ, σ_θ).
        """
        u_ph, context = T.as_tensor(u_ph), T.as_tensor(context)
        noise = np.asarray(noise, dtype=np.float64)
        if noise.shape[-1] != ACTION_DIM or noise.shape[:-2] != u_ph.shape[:-1]:
            raise DimensionError("Rauschen passt nicht zur Aktion", noise.shape, u_ph.shape)
        count = noise.shape[-2]
        mu = u_ph + self.f_mu(T.concat([u_ph, context], axis=-1))
        sigma = T.softplus(self.f_sigma(u_ph))
        batch = u_ph.shape[:-1]
        tile = np.ones((*batch, count, 1))
        u_rep = T.reshape(u_ph, (*batch, 1, ACTION_DIM)) * tile
        s_rep = T.reshape(sigma, (*batch, 1, ACTION_DIM)) * tile
        shape = self.f_shape(T.concat([u_rep, s_rep, Tensor(noise)], axis=-1))
        candidates = T.reshape(mu, (*batch, 1, ACTION_DIM)) + s_rep * shape
        return candidates, mu, sigma

    def epsilon(self, u_hat: Any, omega: int, cond: ArrayLike) -> Tensor:
        u_hat = T.as_tensor(u_hat)
        lead = u_hat.shape[:-1]
        emb = np.broadcast_to(step_embedding(omega, self.config.step_embedding), (*lead, self.config.step_embedding))
        cond = np.asarray(cond, dtype=np.float64)
        cond = np.broadcast_to(cond.reshape(cond.shape[:-1] + (1,) * (len(lead) - cond.ndim + 1) + (CONDITION_DIM,)), (*lead, CONDITION_DIM))
        return self.f_eps(T.concat([u_hat, Tensor(emb), Tensor(cond)], axis=-1))

    def denoise_step(self, u_hat: Any, omega: int, cond: ArrayLike, noise: ArrayLike) -> Tensor:
        """Ein bedingter Rückwärtsschritt ω -> ω−1."""
        return reverse_step(T.as_tensor(u_hat), omega, self.epsilon(u_hat, omega, cond), self.schedule, noise)

    def reverse(self, candidates: Any, cond: ArrayLike, noises: ArrayLike) -> Tensor:
        """κ Rückwärtsschritte; `noises[ω−1]` ist das Rauschen für Schritt ω."""
        noises = np.asarray(noises, dtype=np.float64)
        if noises.shape[0] != self.schedule.kappa:
            raise DimensionError("ein Rauschsatz pro Rückwärtsschritt erwartet", noises.shape)
        u = T.as_tensor(candidates)
        for omega in range(self.schedule.kappa, 0, -1):
            u = self.denoise_step(u, omega, cond, noises[omega - 1])
        return u

    def draw_noise(self, rng: np.random.Generator, batch: tuple[int, ...] = ()) -> tuple[Array, Array]:
        """Rauschstrom für einen Aufruf: (Leapfrog-Rauschen, Rückwärtsrauschen)."""
        count = self.schedule.T_candidates
        init = rng.standard_normal((*batch, count, ACTION_DIM))
        steps = rng.standard_normal((self.schedule.kappa, *batch, count, ACTION_DIM))
        return init, steps

    def __call__(self, u_ph: Any, context: Any, cond: ArrayLike, init_noise: ArrayLike, step_noise: ArrayLike) -> Tensor:
        """Entrauschte Kandidaten û⁰_τ, [..., 𝒯, 2]."""
        candidates, _, _ = self.leapfrog_init(u_ph, context, init_noise)
        return self.reverse(candidates, cond, step_noise)
