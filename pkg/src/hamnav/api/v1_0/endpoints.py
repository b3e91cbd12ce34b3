# -*- coding: utf-8 -*-

"""
Definiert die API-Endpunkte für die Version 1.0.

Alle Routen teilen sich den `NavigationService`, den FastAPI pro Anfrage aus
Einstellungen und geladener Policy zusammensetzt.
"""

# --- 1. Importe ---
from typing import Annotated

from fastapi import APIRouter, Depends

from ..dependencies import LearnedPolicyDep, SettingsDep, get_api_key
from .models import (
    EvaluateRequest,
    EvaluateResponse,
    SimulateRequest,
    SimulateResponse,
    SocialScoreRequest,
    SocialScoreResponse,
)
from .services import NavigationService

# --- 2. Router-Initialisierung ---
router = APIRouter(prefix="/api/v1_0", tags=["Version 1.0"], dependencies=[Depends(get_api_key)])


# --- 3. Service-Abhängigkeit ---
def get_navigation_service(settings: SettingsDep, policy: LearnedPolicyDep) -> NavigationService:
    return NavigationService(settings=settings, learned=policy)


NavigationServiceDep = Annotated[NavigationService, Depends(get_navigation_service)]


# --- 4. Endpunkte ---
@router.post("/simulate", response_model=SimulateResponse)
async def simulate(request: SimulateRequest, service: NavigationServiceDep):
    """Eine geseedete Episode; Antwort mit Zusammenfassung und Trajektorienzeilen."""
    return await service.simulate(request)


@router.post("/evaluate", response_model=EvaluateResponse)
async def evaluate(request: EvaluateRequest, service: NavigationServiceDep):
    """Stapelauswertung über `n_runs` geseedete Episoden."""
    return await service.evaluate(request)


@router.post("/social_score", response_model=SocialScoreResponse)
def social_score(request: SocialScoreRequest, service: NavigationServiceDep):
    return service.social_score(request)
