# -*- coding: utf-8 -*-

"""
Modul für wiederverwendbare FastAPI-Abhängigkeiten (Dependencies).

Der API-Schlüssel ist optional: Ist `HAMNAV_API_KEY` nicht gesetzt, bleibt die
Schnittstelle offen; sonst muss jeder Aufruf den Header `X-API-Key` tragen.
"""

# --- 1. Importe ---
from typing import Annotated, Optional

from fastapi import Depends, HTTPException, Request, Security, status
from fastapi.security import APIKeyHeader

from ..config import AppSettings
from ..rl.policy import HamiltonianPolicy

api_key_header = APIKeyHeader(name="X-API-Key", auto_error=False)


# --- 2. Abhängigkeits-Funktionen ---
def get_settings(request: Request) -> AppSettings:
    """Die beim Start geladenen Einstellungen aus dem App-State."""
    return request.app.state.settings


SettingsDep = Annotated[AppSettings, Depends(get_settings)]


def get_api_key(settings: SettingsDep, key: Optional[str] = Security(api_key_header)) -> Optional[str]:
    if settings.api_key is None or key == settings.api_key:
        return key
    raise HTTPException(
        status_code=status.HTTP_401_UNAUTHORIZED,
        detail="Ungültiger oder fehlender API-Schlüssel",
    )


def get_learned_policy(request: Request) -> Optional[HamiltonianPolicy]:
    return getattr(request.app.state, "policy", None)


LearnedPolicyDep = Annotated[Optional[HamiltonianPolicy], Depends(get_learned_policy)]
