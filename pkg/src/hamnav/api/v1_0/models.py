# -*- coding: utf-8 -*-

"""
Pydantic-Modelle für Anfragen und Antworten der Version 1.0.

FastAPI validiert eingehende Körper gegen diese Modelle, bevor sie den
Service erreichen; ungültige Werte enden als 422.
"""

# --- 1. Importe ---
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

RobotPolicyName = Literal["learned", "orca", "sf", "straight", "zero"]


# --- 2. Eingaben ---
class ScenarioOverrides(BaseModel):
    """Teilmenge von `EnvConfig`, die pro Anfrage überschrieben werden darf."""

    model_config = ConfigDict(extra="forbid")

    n_humans: Optional[int] = Field(None, ge=0, le=15)
    n_static: Optional[int] = Field(None, ge=0, le=10)
    ped_policy: Optional[Literal["orca", "sf", "mixed"]] = None
    sigma_env: Optional[float] = Field(None, ge=0)

    def as_dict(self) -> dict:
        return self.model_dump(exclude_none=True)


class SimulateRequest(BaseModel):
    seed: int = 0
    policy: RobotPolicyName = "orca"
    scenario: ScenarioOverrides = ScenarioOverrides()


class EvaluateRequest(BaseModel):
    seed: int = 0
    policy: RobotPolicyName = "learned"
    n_runs: int = Field(10, ge=1, le=500)
    scenario: ScenarioOverrides = ScenarioOverrides()


class SocialScoreRequest(BaseModel):
    success: bool
    comfort: float = Field(..., ge=0, le=1, description="Anteil der Schritte mit Abstand ≥ d_social")
    straight_distance: float = Field(..., ge=0)
    path_length: float = Field(..., ge=0)


# --- 3. Ausgaben ---
class EpisodeSummary(BaseModel):
    seed: int
    outcome: Literal["success", "collision", "timeout"]
    steps: int
    time: float
    total_reward: float
    min_separation: Optional[float]
    path_length: float
    social_score: float
    social_score_label: str


class SimulateResponse(BaseModel):
    episode: EpisodeSummary
    trajectory: list[str]


class EvaluateResponse(BaseModel):
    n_runs: int
    success_rate: float
    collision_rate: float
    timeout_rate: float
    social_score: float
    social_score_label: str
    mean_navigation_time: Optional[float]
    mean_min_separation: Optional[float]


class SocialScoreResponse(BaseModel):
    social_score: float
    social_score_label: str
