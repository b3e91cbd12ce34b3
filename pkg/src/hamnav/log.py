# -*- coding: utf-8 -*-

"""Logging-Einrichtung für CLI und HTTP-Server."""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """
    Konfiguriert den Root-Logger des Pakets genau einmal.

    Wiederholte Aufrufe setzen nur das Level neu, es werden keine doppelten
    Handler angehängt.
    """
    logger = logging.getLogger("hamnav")
    logger.setLevel(level.upper())
    if not any(getattr(h, "_hamnav", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._hamnav = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
