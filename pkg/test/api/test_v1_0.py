import pytest
from fastapi import HTTPException
from fastapi.testclient import TestClient

# Service für die Unit-Tests, App für die Abhängigkeits-Overrides
from hamnav.api.dependencies import get_settings
from hamnav.api.v1_0.models import EvaluateRequest, ScenarioOverrides, SimulateRequest, SocialScoreRequest
from hamnav.api.v1_0.services import NavigationService
from hamnav.config import load_settings
from hamnav.evaluation.metrics import SOCIAL_SCORE_LABEL, EpisodeRecord
from hamnav.main import app

from test.conftest import SMALL


@pytest.mark.asyncio
async def test_service_simulate_straight_line():
    """
    Testet den NavigationService isoliert (Unit-Test).
    """
    # 1. Vorbereitung (Arrange)
    service = NavigationService(settings=load_settings(**SMALL))
    request = SimulateRequest(seed=1, policy="straight", scenario=ScenarioOverrides(n_humans=0))

    # 2. Ausführung (Act)
    result = await service.simulate(request)

    # 3. Überprüfung (Assert)
    assert result["episode"]["outcome"] == "timeout"
    assert result["episode"]["min_separation"] is None
    assert result["trajectory"][0] == "# hamnav trajectory"


@pytest.mark.asyncio
async def test_service_without_checkpoint_rejects_learned_policy():
    service = NavigationService(settings=load_settings(**SMALL), learned=None)

    with pytest.raises(HTTPException) as info:
        await service.evaluate(EvaluateRequest(policy="learned", n_runs=1))

    assert info.value.status_code == 422


def test_root(test_client: TestClient):
    response = test_client.get("/")

    assert response.status_code == 200
    assert "hamnav" in response.json()["message"]


def test_simulate_endpoint_with_orca(test_client: TestClient):
    """
    Testet den /simulate Endpunkt mit dem vorbereiteten Test-Client (Integration-Test).
    """
    # 1. Vorbereitung (Arrange)
    payload = {"seed": 3, "policy": "orca", "scenario": {"n_humans": 2}}

    # 2. Ausführung (Act)
    response = test_client.post("/api/v1_0/simulate", json=payload)

    # 3. Überprüfung (Assert)
    assert response.status_code == 200
    data = response.json()
    assert data["episode"]["seed"] == 3
    assert data["episode"]["outcome"] in ("success", "collision", "timeout")
    assert data["episode"]["social_score_label"] == SOCIAL_SCORE_LABEL
    assert len(data["trajectory"]) > 2


def test_evaluate_endpoint_with_learned_policy(test_client: TestClient):
    response = test_client.post("/api/v1_0/evaluate", json={"policy": "learned", "n_runs": 1})

    assert response.status_code == 200
    data = response.json()
    assert data["n_runs"] == 1
    assert data["success_rate"] + data["collision_rate"] + data["timeout_rate"] == pytest.approx(100.0)


def test_evaluate_endpoint_with_baseline(test_client: TestClient):
    payload = {"policy": "straight", "n_runs": 1, "scenario": {"n_humans": 0}}

    response = test_client.post("/api/v1_0/evaluate", json=payload)

    assert response.status_code == 200
    assert response.json()["mean_min_separation"] is None


def test_social_score_endpoint(test_client: TestClient):
    payload = {"success": True, "comfort": 0.5, "straight_distance": 8.0, "path_length": 10.0}

    response = test_client.post("/api/v1_0/social_score", json=payload)

    assert response.status_code == 200
    assert response.json()["social_score"] == pytest.approx(81.0)
    assert response.json()["social_score_label"] == SOCIAL_SCORE_LABEL


@pytest.mark.parametrize(
    "payload",
    [
        {"scenario": {"crowd": 3}},
        {"scenario": {"n_humans": 16}},
        {"policy": "teleport"},
        {"n_runs": 0},
    ],
)
def test_invalid_requests_are_rejected(test_client: TestClient, payload):
    response = test_client.post("/api/v1_0/evaluate", json={"policy": "straight", **payload})

    assert response.status_code == 422


def test_api_key_is_enforced_when_configured(test_client: TestClient):
    app.dependency_overrides[get_settings] = lambda: load_settings(**SMALL, api_key="geheim")
    try:
        payload = {"success": False, "comfort": 1.0, "straight_distance": 1.0, "path_length": 1.0}
        denied = test_client.post("/api/v1_0/social_score", json=payload)
        allowed = test_client.post("/api/v1_0/social_score", json=payload, headers={"X-API-Key": "geheim"})
    finally:
        app.dependency_overrides[get_settings] = lambda: load_settings(**SMALL)

    assert denied.status_code == 401
    assert allowed.status_code == 200


@pytest.mark.parametrize(
    "payload, expected",
    [
        ({"success": True, "comfort": 1.0, "straight_distance": 0.0, "path_length": 0.0}, 100.0),
        ({"success": False, "comfort": 0.0, "straight_distance": 5.0, "path_length": 0.0}, 0.0),
        ({"success": True, "comfort": 0.0, "straight_distance": 9.0, "path_length": 3.0}, 70.0),
    ],
)
def test_service_social_score_matches_episode_record(payload, expected):
    service = NavigationService(settings=load_settings(**SMALL))
    record = EpisodeRecord.from_terms(**payload)

    result = service.social_score(SocialScoreRequest(**payload))

    assert result["social_score"] == pytest.approx(expected)
    assert result["social_score"] == pytest.approx(record.social_score)
