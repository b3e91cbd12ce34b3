# -*- coding: utf-8 -*-

"""
Zentrales Konfigurationsmodul für hamnav.

Alle Einstellungen werden mit `pydantic-settings` geladen und validiert.
Quellen in absteigender Priorität:

- explizite Werte (z.B. eine YAML-Laufkonfiguration über `--config`),
- Umgebungsvariablen mit Präfix `HAMNAV_` (verschachtelt über `__`,
  z.B. `HAMNAV_ENV__N_HUMANS=10`),
- eine `.env`-Datei,
- die Standardwerte unten.

Bibliothekscode liest nie das Singleton `settings`, sondern bekommt die
jeweilige Sektion übergeben.
"""

# --- 1. Importe ---
from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError

PedPolicy = Literal["orca", "sf", "mixed"]
Variant = Literal["full", "ph_only", "diffusion_only"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# --- 2. Sektionen ---
class EnvConfig(_Section):
    """Szenario und Fußgängermodelle der Kreuzungsumgebung."""

    n_humans: int = Field(5, ge=0, le=15)
    n_static: int = Field(0, ge=0, le=10)
    ped_policy: PedPolicy = "orca"
    dt: float = Field(0.25, gt=0)
    time_limit: float = Field(40.0, gt=0)
    arena_size: float = Field(20.0, gt=0)
    circle_radius: float = Field(8.0, gt=0)
    angle_jitter: float = Field(0.1, ge=0)
    human_radius: float = Field(0.3, gt=0)
    robot_radius: float = Field(0.3, gt=0)
    human_v_pref: float = Field(1.0, gt=0)
    robot_v_pref: float = Field(1.0, gt=0)
    # ORCA
    orca_horizon: float = Field(5.0, gt=0)
    orca_horizon_static: float = Field(5.0, gt=0)
    orca_neighbor_dist: float = Field(10.0, gt=0)
    orca_max_neighbors: int = Field(10, ge=1)
    orca_safety_margin: float = Field(0.01, ge=0)
    # Social Force (Beschleunigungseinheiten, Einheitsmasse)
    sf_tau: float = Field(0.5, gt=0)
    sf_a: float = Field(2.0, ge=0)
    sf_b: float = Field(0.08, gt=0)
    sf_force_max: float = Field(10.0, gt=0)
    sigma_env: float = Field(0.0, ge=0)
    max_placement_attempts: int = Field(1000, ge=1)
    robot_visible: bool = False

    @model_validator(mode="after")
    def _circle_inside_arena(self) -> "EnvConfig":
        if self.circle_radius + max(self.human_radius, self.robot_radius) > self.arena_size / 2:
            raise ValueError("Kreisradius passt nicht in die Arena")
        return self


class RewardConfig(_Section):
    success: float = 10.0
    collision: float = -20.0
    discomfort_scale: float = Field(0.5, ge=0)
    social_distance: float = Field(0.5, gt=0)
    progress: float = 2.0
    step_penalty: float = Field(0.01, ge=0)


class EncoderConfig(_Section):
    d_model: int = Field(32, ge=2)
    n_heads: int = Field(2, ge=1)
    window: int = Field(5, ge=1)
    head_hidden: int = Field(32, ge=1)
    energy_width: int = Field(16, ge=1)

    @model_validator(mode="after")
    def _heads_divide_width(self) -> "EncoderConfig":
        if self.d_model % self.n_heads:
            raise ValueError("d_model muss durch n_heads teilbar sein")
        return self


class DiffusionConfig(_Section):
    K: int = Field(100, ge=1)
    kappa: int = Field(5, ge=1)
    alpha_start: float = Field(1e-4, gt=0, lt=1)
    alpha_end: float = Field(0.05, gt=0, lt=1)
    T_candidates: int = Field(20, ge=1)
    eps_hidden: int = Field(64, ge=1)
    step_embedding: int = Field(16, ge=2)
    # Fester Bedingungsvektor I_C; None = aus dem Szenario ableiten.
    condition: list[float] | None = None

    @model_validator(mode="after")
    def _schedule_consistent(self) -> "DiffusionConfig":
        if self.kappa > self.K:
            raise ValueError("kappa muss ≤ K sein")
        if self.K > 1 and not self.alpha_start < self.alpha_end:
            raise ValueError("alpha_start muss kleiner als alpha_end sein")
        if self.condition is not None and len(self.condition) != 5:
            raise ValueError("condition braucht genau 5 Einträge")
        return self


class PolicyConfig(_Section):
    variant: Variant = "full"
    mass: float = Field(1.0, gt=0)
    stiffness: float = Field(1.0, ge=0)
    damping: float = Field(1.0, ge=0)
    init_log_std: float = -0.5
    critic_hidden: int = Field(64, ge=1)
    critic_neighbors: int = Field(6, ge=1)


class TrainConfig(_Section):
    gamma: float = Field(0.99, gt=0, le=1)
    gae_lambda: float = Field(0.95, ge=0, le=1)
    clip_epsilon: float = Field(0.2, gt=0, lt=1)
    epochs: int = Field(4, ge=1)
    minibatch_size: int = Field(256, ge=1)
    total_episodes: int = Field(10_000, ge=0)
    episodes_per_update: int = Field(16, ge=1)
    learning_rate: float = Field(4e-5, gt=0)
    critic_learning_rate: float = Field(4e-5, gt=0)
    max_grad_norm: float = Field(0.5, gt=0)
    workers: int = Field(16, ge=1)
    checkpoint_every: int = Field(10, ge=1)
    seed: int = 0


class EvalConfig(_Section):
    n_runs: int = Field(500, ge=1)
    workers: int = Field(16, ge=1)


# --- 3. Globale Anwendungskonfiguration ---
SECTIONS = ("env", "reward", "encoder", "diffusion", "policy", "train", "eval")


class AppSettings(BaseSettings):
    """Führt alle Sektionen zusammen; Zugriff z.B. über `settings.env.n_humans`."""

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    # Optionaler Schlüssel für die HTTP-Schnittstelle; None = offen.
    api_key: str | None = None
    # Policy-Checkpoint, den die HTTP-Schnittstelle beim Start lädt.
    checkpoint: Path | None = None

    env: EnvConfig = EnvConfig()
    reward: RewardConfig = RewardConfig()
    encoder: EncoderConfig = EncoderConfig()
    diffusion: DiffusionConfig = DiffusionConfig()
    policy: PolicyConfig = PolicyConfig()
    train: TrainConfig = TrainConfig()
    eval: EvalConfig = EvalConfig()

    model_config = SettingsConfigDict(
        env_prefix="HAMNAV_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def run_config(self) -> dict[str, Any]:
        """Die reproduzierbaren Sektionen als einfaches Dict (für Checkpoint-Metadaten)."""
        return self.model_dump(mode="json", include={"log_level", *SECTIONS})


# --- 4. Laden ---
def load_settings(path: str | Path | None = None, **overrides: Any) -> AppSettings:
    """
    Lädt die Einstellungen, optional ergänzt um eine YAML-Laufkonfiguration.

    Unbekannte Schlüssel und verletzte Bedingungen führen zu `ConfigError`.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"Konfigurationsdatei {path} nicht lesbar: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: erwartet ein Schlüssel-Wert-Dokument")
        unknown = sorted(set(loaded) - {"log_level", *SECTIONS})
        if unknown:
            raise ConfigError(f"{path}: unbekannte Schlüssel {unknown}")
        data.update(loaded)
    for section, values in overrides.items():
        if section in SECTIONS and isinstance(values, dict):
            data[section] = {**data.get(section, {}), **values}
        else:
            data[section] = values
    try:
        return AppSettings(**data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


# --- 5. Singleton für die HTTP-Schnittstelle ---
settings = AppSettings()
