# -*- coding: utf-8 -*-

"""
Stapelauswertung: Erfolgs-, Kollisions- und Zeitüberschreitungsraten und ein
sozialer Score je Episode.

Der soziale Score ist eine lokale Ersatzmetrik und wird in jeder Ausgabe als
solche gekennzeichnet:

    SS = 100 · (0.5·Erfolg + 0.3·Komfort + 0.2·Pfadeffizienz)

Komfort ist der Anteil der Schritte mit Mindestabstand ≥ d_social,
Pfadeffizienz das Verhältnis Luftlinie Start–Ziel zu gefahrener Weglänge.
"""

# --- 1. Importe ---
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..config import EnvConfig, RewardConfig
from ..env.crowd import CrowdSim, SocialReward
from ..env.state import Done
from ..errors import EvaluationError
from ..rl.buffer import Episode
from ..rl.policy import RobotPolicy
from ..rl.rollout import collect_episodes, episode_seeds

logger = logging.getLogger(__name__)

SOCIAL_SCORE_LABEL = "social_score (lokale Ersatzmetrik, keine veröffentlichte Definition)"
SOCIAL_SCORE_WEIGHTS = (0.5, 0.3, 0.2)


# --- 2. Episodenebene ---
@dataclass(frozen=True)
class EpisodeRecord:
    seed: int
    outcome: Done
    steps: int
    time: float
    min_separation: float
    path_length: float
    straight_distance: float
    comfort: float
    total_reward: float

    @property
    def success(self) -> bool:
        return self.outcome == Done.SUCCESS

    @property
    def efficiency(self) -> float:
        if self.path_length <= 0.0:
            return 1.0 if self.straight_distance <= 0.0 else 0.0
        return min(1.0, self.straight_distance / self.path_length)

    @property
    def social_score(self) -> float:
        return social_score(self)

    @classmethod
    def from_terms(cls, success: bool, comfort: float, straight_distance: float, path_length: float) -> "EpisodeRecord":
        """Record ohne Rollout, nur mit den Größen der Bewertung; Misserfolg zählt als Zeitüberschreitung."""
        outcome = Done.SUCCESS if success else Done.TIMEOUT
        return cls(-1, outcome, 0, 0.0, math.inf, path_length, straight_distance, comfort, 0.0)

    @classmethod
    def from_episode(cls, episode: Episode, social_distance: float) -> "EpisodeRecord":
        if episode.done is None:
            raise EvaluationError(f"Episode {episode.seed} ist nicht abgeschlossen")
        positions = np.array([s.robot.p for s in episode.states])
        path = float(np.sum(np.linalg.norm(np.diff(positions, axis=0), axis=1))) if len(positions) > 1 else 0.0
        start = episode.states[0].robot
        seps = np.asarray(episode.min_separations, dtype=np.float64)
        comfort = float(np.mean(seps >= social_distance)) if seps.size else 1.0
        return cls(
            seed=episode.seed,
            outcome=episode.done,
            steps=len(episode),
            time=episode.final_state.t,
            min_separation=float(seps.min()) if seps.size else math.inf,
            path_length=path,
            straight_distance=float(np.linalg.norm(start.g - start.p)),
            comfort=comfort,
            total_reward=episode.total_reward,
        )


def social_score_terms(success: bool, comfort: float, efficiency: float) -> float:
    w_success, w_comfort, w_efficiency = SOCIAL_SCORE_WEIGHTS
    comfort = min(max(comfort, 0.0), 1.0)
    efficiency = min(max(efficiency, 0.0), 1.0)
    return 100.0 * (w_success * float(success) + w_comfort * comfort + w_efficiency * efficiency)


def social_score(record: EpisodeRecord) -> float:
    """Lokale Ersatzmetrik in [0, 100]; siehe Moduldokumentation."""
    return social_score_terms(record.success, record.comfort, record.efficiency)


# --- 3. Bericht ---
@dataclass(frozen=True)
class EvalReport:
    n_runs: int
    success_rate: float
    collision_rate: float
    timeout_rate: float
    social_score: float
    # über erfolgreiche Episoden; None ohne Erfolg
    mean_navigation_time: float | None
    # über Episoden mit mindestens einem Fußgänger
    mean_min_separation: float | None
    records: list[EpisodeRecord] = field(default_factory=list)
    social_score_label: str = SOCIAL_SCORE_LABEL

    @classmethod
    def from_records(cls, records: list[EpisodeRecord]) -> "EvalReport":
        n = len(records)
        if n == 0:
            raise EvaluationError("Auswertung ohne Episoden")
        count = {d: sum(r.outcome == d for r in records) for d in Done}
        times = [r.time for r in records if r.success]
        seps = [r.min_separation for r in records if math.isfinite(r.min_separation)]
        return cls(
            n_runs=n,
            success_rate=100.0 * count[Done.SUCCESS] / n,
            collision_rate=100.0 * count[Done.COLLISION] / n,
            timeout_rate=100.0 * count[Done.TIMEOUT] / n,
            social_score=float(np.mean([r.social_score for r in records])),
            mean_navigation_time=float(np.mean(times)) if times else None,
            mean_min_separation=float(np.mean(seps)) if seps else None,
            records=list(records),
        )

    def summary(self) -> str:
        nav = "–" if self.mean_navigation_time is None else f"{self.mean_navigation_time:.2f} s"
        sep = "–" if self.mean_min_separation is None else f"{self.mean_min_separation:.3f} m"
        return "\n".join(
            [
                f"Episoden:           {self.n_runs}",
                f"Erfolg:             {self.success_rate:.1f} %",
                f"Kollision:          {self.collision_rate:.1f} %",
                f"Zeitüberschreitung: {self.timeout_rate:.1f} %",
                f"Navigationszeit:    {nav}",
                f"Mindestabstand:     {sep}",
                f"{SOCIAL_SCORE_LABEL}: {self.social_score:.1f}",
            ]
        )

    def table(self) -> list[str]:
        """Tabulatorgetrennte Zeilen, eine je Episode."""
        header = ["seed", "outcome", "steps", "time", "min_separation", "path_length", "comfort", "efficiency", "social_score"]
        lines = ["\t".join(header)]
        for r in self.records:
            lines.append(
                "\t".join(
                    [
                        str(r.seed),
                        r.outcome.value,
                        str(r.steps),
                        f"{r.time:.3f}",
                        f"{r.min_separation:.4f}",
                        f"{r.path_length:.4f}",
                        f"{r.comfort:.4f}",
                        f"{r.efficiency:.4f}",
                        f"{r.social_score:.2f}",
                    ]
                )
            )
        return lines

    def as_dict(self) -> dict:
        data = asdict(self)
        data["records"] = [
            {**asdict(r), "outcome": r.outcome.value, "social_score": r.social_score, "efficiency": r.efficiency}
            for r in self.records
        ]
        for rec in data["records"]:
            if not math.isfinite(rec["min_separation"]):
                rec["min_separation"] = None
        return data


# --- 4. Auswertung ---
def evaluate(
    policy: RobotPolicy,
    env_config: EnvConfig,
    n_runs: int,
    seed: int,
    reward_config: RewardConfig = RewardConfig(),
    workers: int = 1,
) -> EvalReport:
    """`n_runs` geseedete Episoden im deterministischen Auswertungsmodus."""
    if n_runs < 1:
        raise EvaluationError("n_runs muss ≥ 1 sein")
    policy.check_compatible(env_config)
    sim = CrowdSim(env_config, SocialReward(reward_config))
    episodes = collect_episodes(sim, policy, episode_seeds(seed, n_runs), "eval", workers)
    report = EvalReport.from_records([EpisodeRecord.from_episode(e, reward_config.social_distance) for e in episodes])
    logger.info(
        "Auswertung %s: %d Episoden, Erfolg %.1f %%, Kollision %.1f %%, Zeitüberschreitung %.1f %%, SS %.1f",
        getattr(policy, "name", type(policy).__name__),
        report.n_runs,
        report.success_rate,
        report.collision_rate,
        report.timeout_rate,
        report.social_score,
    )
    return report
