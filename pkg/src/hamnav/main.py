# -*- coding: utf-8 -*-

"""
Hauptmodul der hamnav API.

Initialisiert die FastAPI-Anwendung:
- Lifespan: Logging einrichten, optional einen Policy-Checkpoint laden.
- Einbinden der versionierten Router.
"""

# --- 1. Importe ---
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from .__about__ import __version__
from .api.v1_0 import endpoints as v1_endpoints
from .config import settings
from .log import configure_logging
from .rl.policy import load_policy

logger = logging.getLogger(__name__)


# --- 2. Lifespan-Manager ---
@asynccontextmanager
async def lifespan(app: FastAPI):
    """Code vor dem `yield` läuft beim Start, danach beim Herunterfahren."""
    configure_logging(settings.log_level)
    app.state.settings = settings
    app.state.policy = None
    if settings.checkpoint is not None:
        policy, _, meta = load_policy(settings.checkpoint)
        app.state.policy = policy
        logger.info("Policy geladen: %s (Variante %s, Version %s)", settings.checkpoint, meta.get("variant"), meta.get("version"))
    yield
    app.state.policy = None


# --- 3. Initialisierung der FastAPI-Anwendung ---
app = FastAPI(
    title="hamnav API",
    description="Simulation und Auswertung sozial verträglicher Roboternavigation in Menschenmengen.",
    version=__version__,
    lifespan=lifespan,
)

app.include_router(v1_endpoints.router)


# --- 4. Root-Endpunkt ---
@app.get("/", tags=["General"])
def read_root():
    """Health Check."""
    return {"message": "Willkommen zur hamnav API", "version": __version__}
