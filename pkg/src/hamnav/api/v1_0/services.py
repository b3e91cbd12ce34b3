# -*- coding: utf-8 -*-

"""
Modul für die Geschäftslogik (Service Layer) der API.

`NavigationService` übersetzt Anfragen in Simulator- und Auswertungsaufrufe.
Die Rechenarbeit ist synchron und läuft über `run_in_threadpool`, damit der
Event-Loop frei bleibt. Fachliche Fehler werden hier in `HTTPException`
übersetzt: Eingabefehler als 422, alles andere als 500.
"""

# --- 1. Importe ---
import logging
import math
from typing import Any, Optional

from fastapi import HTTPException, status
from fastapi.concurrency import run_in_threadpool
from pydantic import ValidationError

from ...config import AppSettings, EnvConfig
from ...env.crowd import CrowdSim, SocialReward
from ...env.trajectory import trajectory_lines
from ...errors import HamnavError, ScenarioError
from ...evaluation.metrics import SOCIAL_SCORE_LABEL, EpisodeRecord, evaluate
from ...rl.baselines import BASELINES
from ...rl.policy import HamiltonianPolicy, RobotPolicy
from ...rl.rollout import run_episode
from .models import EvaluateRequest, ScenarioOverrides, SimulateRequest, SocialScoreRequest

logger = logging.getLogger(__name__)


# --- 2. Fehlerübersetzung ---
def to_http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, (ValueError, ScenarioError)):
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))
    logger.error("Interner Fehler: %s", exc)
    return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=f"Interner Fehler: {exc}")


# --- 3. Die Service-Klasse ---
class NavigationService:
    """Simulation und Auswertung für eine Anfrage; zustandslos bis auf Einstellungen und Policy."""

    def __init__(self, settings: AppSettings, learned: Optional[HamiltonianPolicy] = None):
        self.settings = settings
        self.learned = learned

    def _env(self, overrides: ScenarioOverrides) -> EnvConfig:
        try:
            return EnvConfig(**{**self.settings.env.model_dump(), **overrides.as_dict()})
        except ValidationError as exc:
            raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc)) from exc

    def _policy(self, name: str, env: EnvConfig) -> RobotPolicy:
        if name == "learned":
            if self.learned is None:
                raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail="Kein Policy-Checkpoint geladen")
            return self.learned
        return BASELINES[name](env)

    def _summary(self, record: EpisodeRecord) -> dict[str, Any]:
        return {
            "seed": record.seed,
            "outcome": record.outcome.value,
            "steps": record.steps,
            "time": record.time,
            "total_reward": record.total_reward,
            "min_separation": record.min_separation if math.isfinite(record.min_separation) else None,
            "path_length": record.path_length,
            "social_score": record.social_score,
            "social_score_label": SOCIAL_SCORE_LABEL,
        }

    # --- Synchrone Kerne ---
    def _simulate(self, request: SimulateRequest) -> dict[str, Any]:
        env = self._env(request.scenario)
        policy = self._policy(request.policy, env)
        try:
            policy.check_compatible(env)
            sim = CrowdSim(env, SocialReward(self.settings.reward))
            episode = run_episode(sim, policy, request.seed, "eval")
        except HamnavError as exc:
            raise to_http_error(exc) from exc
        record = EpisodeRecord.from_episode(episode, self.settings.reward.social_distance)
        return {"episode": self._summary(record), "trajectory": trajectory_lines(episode.states)}

    def _evaluate(self, request: EvaluateRequest) -> dict[str, Any]:
        env = self._env(request.scenario)
        policy = self._policy(request.policy, env)
        try:
            report = evaluate(policy, env, request.n_runs, request.seed, self.settings.reward, self.settings.eval.workers)
        except HamnavError as exc:
            raise to_http_error(exc) from exc
        data = report.as_dict()
        data.pop("records")
        return data

    # --- Öffentliche Methoden ---
    async def simulate(self, request: SimulateRequest) -> dict[str, Any]:
        return await run_in_threadpool(self._simulate, request)

    async def evaluate(self, request: EvaluateRequest) -> dict[str, Any]:
        return await run_in_threadpool(self._evaluate, request)

    def social_score(self, request: SocialScoreRequest) -> dict[str, Any]:
        record = EpisodeRecord.from_terms(request.success, request.comfort, request.straight_distance, request.path_length)
        return {
            "social_score": record.social_score,
            "social_score_label": SOCIAL_SCORE_LABEL,
        }
