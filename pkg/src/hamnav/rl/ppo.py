# -*- coding: utf-8 -*-

"""
Verlustterme für PPO: Vorteilsschätzung, geclippte Surrogat-Zielfunktion,
Kritikerregression.
"""

# --- 1. Importe ---
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike

from ..errors import DimensionError, NonFiniteError, NonFiniteRatioError
from ..nn import tensor as T
from ..nn.tensor import Tensor

if TYPE_CHECKING:
    from .buffer import Batch
    from .policy import Critic, HamiltonianPolicy


# --- 2. Vorteile ---
def gae(
    rewards: ArrayLike,
    values: ArrayLike,
    bootstrap: float,
    gamma: float,
    lam: float,
    dones: ArrayLike | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Generalized Advantage Estimation über eine Episode.

    A_t = Σ_l (γλ)^l δ_{t+l} mit δ_t = r_t + γ·V(s_{t+1}) − V(s_t). Nach einem
    Schritt mit `dones[t]` wird nicht weiter gebootstrappt. Rückgabe
    (Vorteile, Wertziele A_t + V(s_t)).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.zeros(len(rewards), dtype=bool) if dones is None else np.asarray(dones, dtype=bool)
    if not rewards.shape == values.shape == dones.shape or rewards.ndim != 1:
        raise DimensionError("rewards, values und dones müssen gleich lang sein", rewards.shape, values.shape, dones.shape)
    advantages = np.zeros_like(rewards)
    carry = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        live = 0.0 if dones[t] else 1.0
        next_value = bootstrap if t == len(rewards) - 1 else values[t + 1]
        delta = rewards[t] + gamma * next_value * live - values[t]
        carry = delta + gamma * lam * live * carry
        advantages[t] = carry
    return advantages, advantages + values


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    if advantages.size < 2:
        return advantages - advantages.mean() if advantages.size else advantages
    return (advantages - advantages.mean()) / (advantages.std() + 1e-8)


# --- 3. Actor ---
@dataclass(frozen=True)
class ActorStats:
    loss: float
    mean_ratio: float
    max_abs_log_ratio: float
    clip_fraction: float


def clipped_surrogate(ratio: Tensor, advantages: np.ndarray, epsilon: float) -> tuple[Tensor, np.ndarray]:
    """
    Verlust je Stichprobe −min(ρ·A, clip(ρ, 1−ε, 1+ε)·A) und die Maske aktiver Clips.

    Wo der Clip greift, ist der Term konstant in θ.
    """
    r = ratio.data
    unclipped = r * advantages
    clipped = np.clip(r, 1.0 - epsilon, 1.0 + epsilon) * advantages
    active = clipped < unclipped
    surrogate = ratio * advantages * (~active) + clipped * active
    return -surrogate, active


def ppo_actor_loss(batch: Batch, policy: "HamiltonianPolicy", epsilon: float) -> tuple[Tensor, ActorStats]:
    if len(batch) == 0:
        raise DimensionError("leerer Batch", (0,))
    diagnostics = {
        "batch_size": len(batch),
        "old_log_prob_range": (float(batch.old_log_probs.min()), float(batch.old_log_probs.max())),
    }
    try:
        log_probs = policy.batch_log_prob(batch.windows, batch.conditions, batch.noise_seeds, batch.actions)
        log_ratio = log_probs - batch.old_log_probs
    except NonFiniteError as exc:
        raise NonFiniteRatioError("log π_θ nicht endlich", {**diagnostics, "cause": str(exc)}) from exc
    with np.errstate(over="ignore"):
        bad = ~np.isfinite(np.exp(log_ratio.data))
    if bad.any():
        raise NonFiniteRatioError(
            "Wahrscheinlichkeitsverhältnis nicht endlich",
            {**diagnostics, "n_bad": int(bad.sum()), "max_log_ratio": float(log_ratio.data.max())},
        )
    ratio = T.exp(log_ratio)
    per_sample, active = clipped_surrogate(ratio, batch.advantages, epsilon)
    loss = T.mean(per_sample)
    stats = ActorStats(
        loss=loss.item(),
        mean_ratio=float(ratio.data.mean()),
        max_abs_log_ratio=float(np.abs(log_ratio.data).max()),
        clip_fraction=float(active.mean()),
    )
    return loss, stats


# --- 4. Kritiker ---
def critic_loss(batch: Batch, critic: "Critic") -> Tensor:
    """Mittlerer quadratischer Fehler zwischen V_φ(s_t) und den GAE-Wertzielen."""
    features = np.stack([critic.features(s) for s in batch.states])
    return value_loss(critic(features), batch.returns)


def value_loss(predictions: Tensor, targets: ArrayLike) -> Tensor:
    return T.mean(T.square(predictions - np.asarray(targets, dtype=np.float64)))
