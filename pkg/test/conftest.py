import pytest
from fastapi.testclient import TestClient
from typing import Generator

# Importiere die Haupt-App und die zu überschreibenden Abhängigkeiten
from hamnav.api.dependencies import get_learned_policy, get_settings
from hamnav.config import AppSettings, EnvConfig, load_settings
from hamnav.main import app
from hamnav.rl.policy import HamiltonianPolicy

# Kleine Netze und kurze Episoden, damit die gelernte Policy in Sekunden läuft.
SMALL = {
    "env": {"n_humans": 2, "time_limit": 2.0},
    "encoder": {"d_model": 8, "n_heads": 2, "window": 2, "head_hidden": 8, "energy_width": 4},
    "diffusion": {"K": 10, "kappa": 2, "T_candidates": 3, "eps_hidden": 8, "step_embedding": 4},
    "policy": {"critic_hidden": 8, "critic_neighbors": 2},
    "train": {"workers": 1, "episodes_per_update": 2, "minibatch_size": 8, "epochs": 1},
    "eval": {"workers": 1, "n_runs": 2},
}


@pytest.fixture
def small_settings() -> AppSettings:
    """Einstellungen mit kleinen Netzen; Abschnitte lassen sich im Test per `load_settings` ergänzen."""
    return load_settings(**SMALL)


@pytest.fixture
def small_policy(small_settings: AppSettings) -> HamiltonianPolicy:
    return HamiltonianPolicy(small_settings)


@pytest.fixture
def empty_world() -> EnvConfig:
    """Szenario ohne Fußgänger."""
    return EnvConfig(n_humans=0)


@pytest.fixture(scope="module")
def test_client() -> Generator[TestClient, None, None]:
    """
    Erstellt einen TestClient, der für die Dauer der Tests mit kleinen
    Einstellungen und einer frisch initialisierten gelernten Policy arbeitet.
    """
    settings = load_settings(**SMALL)
    policy = HamiltonianPolicy(settings)

    # Diese Funktionen werden anstelle der echten Getter aufgerufen.
    app.dependency_overrides[get_settings] = lambda: settings
    app.dependency_overrides[get_learned_policy] = lambda: policy

    with TestClient(app) as client:
        yield client

    # Code nach dem 'yield' wird nach den Tests ausgeführt (Aufräumen).
    app.dependency_overrides.clear()
