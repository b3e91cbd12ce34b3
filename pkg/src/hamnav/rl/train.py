# -*- coding: utf-8 -*-

"""
PPO-Trainingsschleife.

Pro Update:

1. Momentaufnahme der Policy, Episoden parallel unter ihr sammeln.
2. Kritikerwerte und GAE je Episode, Vorteile normalisieren.
3. `epochs` Durchläufe über gemischte Minibatches, je ein Actor- und ein
   Kritikerschritt.
4. Metriken protokollieren, periodisch einen Checkpoint schreiben.

Wird ein Verlust nicht-endlich, bricht das Training mit
`TrainingDivergedError` ab; der zuletzt geschriebene Checkpoint bleibt
unangetastet.
"""

# --- 1. Importe ---
from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ..config import AppSettings
from ..env.crowd import CrowdSim, SocialReward
from ..env.state import Done
from ..errors import NonFiniteError, NonFiniteRatioError, TrainingDivergedError
from ..nn.params import Adam
from .buffer import RolloutBuffer
from .policy import Critic, HamiltonianPolicy, save_policy
from .ppo import critic_loss, normalize_advantages, ppo_actor_loss
from .rollout import collect_episodes, episode_seeds

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "policy.ckpt"
METRICS_NAME = "metrics.tsv"
# dritter Zufallsstrom: Minibatch-Reihenfolge
SHUFFLE_STREAM = 2


# --- 2. Metriken ---
@dataclass(frozen=True)
class UpdateMetrics:
    update: int
    episodes: int
    steps: int
    mean_return: float
    success_rate: float
    collision_rate: float
    actor_loss: float
    critic_loss: float
    mean_ratio: float
    clip_fraction: float
    rejected_batches: int


class MetricsLog:
    """Tabulatorgetrenntes, nur anhängendes Protokoll; ohne Pfad nur im Speicher."""

    columns = [f.name for f in fields(UpdateMetrics)]

    def __init__(self, path: Path | None = None):
        self.path = path
        self.rows: list[UpdateMetrics] = []

    def append(self, metrics: UpdateMetrics) -> None:
        self.rows.append(metrics)
        if self.path is None:
            return
        new = not self.path.exists()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=self.columns, delimiter="\t")
            if new:
                writer.writeheader()
            writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in asdict(metrics).items()})


@dataclass
class TrainResult:
    policy: HamiltonianPolicy
    critic: Critic
    metrics: list[UpdateMetrics] = field(default_factory=list)
    checkpoint: Path | None = None


# --- 3. Schleife ---
def train(
    settings: AppSettings,
    policy: HamiltonianPolicy | None = None,
    critic: Critic | None = None,
    out_dir: str | Path | None = None,
    sim: CrowdSim | None = None,
) -> TrainResult:
    cfg = settings.train
    policy = policy or HamiltonianPolicy(settings)
    critic = critic or Critic(settings)
    policy.check_compatible(settings.env)
    sim = sim or CrowdSim(settings.env, SocialReward(settings.reward))
    out = Path(out_dir) if out_dir is not None else None
    log = MetricsLog(out / METRICS_NAME if out else None)
    result = TrainResult(policy, critic)

    actor_opt = Adam(policy.store, lr=cfg.learning_rate, max_grad_norm=cfg.max_grad_norm)
    critic_opt = Adam(critic.store, lr=cfg.critic_learning_rate, max_grad_norm=cfg.max_grad_norm)
    seeds = episode_seeds(cfg.seed, cfg.total_episodes)
    shuffle = np.random.default_rng([cfg.seed, SHUFFLE_STREAM])

    for update, start in enumerate(range(0, cfg.total_episodes, cfg.episodes_per_update), start=1):
        snapshot = policy.clone()
        episodes = collect_episodes(sim, snapshot, seeds[start : start + cfg.episodes_per_update], "train", cfg.workers)
        buffer = RolloutBuffer(episodes)
        batch = buffer.to_batch(critic.values, cfg.gamma, cfg.gae_lambda)
        batch.advantages = normalize_advantages(batch.advantages)

        actor_losses, critic_losses, ratios, clips = [], [], [], []
        rejected = 0
        try:
            for _ in range(cfg.epochs):
                for mb in batch.minibatches(cfg.minibatch_size, shuffle):
                    try:
                        loss, stats = ppo_actor_loss(mb, policy, cfg.clip_epsilon)
                    except NonFiniteRatioError as exc:
                        logger.warning("Minibatch verworfen: %s", exc.diagnostics)
                        rejected += 1
                        continue
                    policy.store.zero_grad()
                    policy.store.backward(loss)
                    actor_opt.step()
                    c_loss = critic_loss(mb, critic)
                    critic.store.zero_grad()
                    critic.store.backward(c_loss)
                    critic_opt.step()
                    actor_losses.append(stats.loss)
                    critic_losses.append(c_loss.item())
                    ratios.append(stats.mean_ratio)
                    clips.append(stats.clip_fraction)
            if len(batch) and not actor_losses:
                raise NonFiniteError("alle Minibatches des Updates verworfen")
        except NonFiniteError as exc:
            logger.error("Training in Update %d divergiert: %s", update, exc)
            if out is not None and result.checkpoint is None:
                result.checkpoint = save_policy(out / CHECKPOINT_NAME, snapshot, critic, update=update - 1)
            raise TrainingDivergedError(f"Update {update}: {exc}; letzter guter Checkpoint: {result.checkpoint}") from exc

        metrics = UpdateMetrics(
            update=update,
            episodes=len(episodes),
            steps=len(batch),
            mean_return=float(np.mean([e.total_reward for e in episodes])),
            success_rate=float(np.mean([e.done == Done.SUCCESS for e in episodes])),
            collision_rate=float(np.mean([e.done == Done.COLLISION for e in episodes])),
            actor_loss=float(np.mean(actor_losses)) if actor_losses else 0.0,
            critic_loss=float(np.mean(critic_losses)) if critic_losses else 0.0,
            mean_ratio=float(np.mean(ratios)) if ratios else 1.0,
            clip_fraction=float(np.mean(clips)) if clips else 0.0,
            rejected_batches=rejected,
        )
        log.append(metrics)
        logger.info(
            "Update %d: %d Episoden, Return %.3f, Erfolg %.2f, Kollision %.2f, L_actor %.4f, L_critic %.4f",
            update,
            metrics.episodes,
            metrics.mean_return,
            metrics.success_rate,
            metrics.collision_rate,
            metrics.actor_loss,
            metrics.critic_loss,
        )
        if out is not None and update % cfg.checkpoint_every == 0:
            result.checkpoint = save_policy(out / CHECKPOINT_NAME, policy, critic, update=update)
            logger.info("Checkpoint geschrieben: %s", result.checkpoint)

    if out is not None and log.rows and log.rows[-1].update % cfg.checkpoint_every:
        result.checkpoint = save_policy(out / CHECKPOINT_NAME, policy, critic, update=log.rows[-1].update)
        logger.info("Checkpoint geschrieben: %s", result.checkpoint)
    result.metrics = log.rows
    return result
