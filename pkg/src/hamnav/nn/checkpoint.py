# -*- coding: utf-8 -*-

"""
Versioniertes Binärformat für Parameter-Checkpoints.

Aufbau (little-endian):
    MAGIC (8 Byte) | Version (uint32) | Länge Metadaten (uint32) | Metadaten (UTF-8 JSON)
    | Anzahl Einträge (uint32)
    | je Eintrag: Namenslänge (uint32), Name (UTF-8), ndim (uint32), Form (ndim × uint32),
      Werte (prod(Form) × float64)
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path
from typing import Any, BinaryIO

import numpy as np

from ..errors import CheckpointFormatError
from .tensor import Array

logger = logging.getLogger(__name__)

MAGIC = b"HAMNAVCK"
FORMAT_VERSION = 1
_U32 = struct.Struct("<I")


def _write_u32(fh: BinaryIO, value: int) -> None:
    fh.write(_U32.pack(value))


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CheckpointFormatError("Checkpoint ist abgeschnitten")
    return data


def _read_u32(fh: BinaryIO) -> int:
    return _U32.unpack(_read_exact(fh, 4))[0]


def save_checkpoint(path: str | Path, state: dict[str, Array], metadata: dict[str, Any] | None = None) -> Path:
    """Schreibt `state` (Name -> Array) samt JSON-Metadaten; Namen werden sortiert abgelegt."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = json.dumps(metadata or {}, sort_keys=True).encode("utf-8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        _write_u32(fh, FORMAT_VERSION)
        _write_u32(fh, len(meta))
        fh.write(meta)
        _write_u32(fh, len(state))
        for name in sorted(state):
            values = np.ascontiguousarray(state[name], dtype="<f8")
            encoded = name.encode("utf-8")
            _write_u32(fh, len(encoded))
            fh.write(encoded)
            _write_u32(fh, values.ndim)
            for dim in values.shape:
                _write_u32(fh, dim)
            fh.write(values.tobytes())
    tmp.replace(path)
    logger.info("Checkpoint geschrieben: %s (%d Tensoren)", path, len(state))
    return path


def load_checkpoint(path: str | Path) -> tuple[dict[str, Array], dict[str, Any]]:
    """Liest einen Checkpoint; unbekannte Signatur oder Version wird abgelehnt."""
    with open(path, "rb") as fh:
        if _read_exact(fh, len(MAGIC)) != MAGIC:
            raise CheckpointFormatError(f"{path}: keine hamnav-Checkpoint-Datei")
        version = _read_u32(fh)
        if version != FORMAT_VERSION:
            raise CheckpointFormatError(f"{path}: unbekannte Formatversion {version}")
        metadata = json.loads(_read_exact(fh, _read_u32(fh)).decode("utf-8"))
        state: dict[str, Array] = {}
        for _ in range(_read_u32(fh)):
            name = _read_exact(fh, _read_u32(fh)).decode("utf-8")
            shape = tuple(_read_u32(fh) for _ in range(_read_u32(fh)))
            count = int(np.prod(shape)) if shape else 1
            raw = _read_exact(fh, 8 * count)
            state[name] = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)
        if fh.read(1):
            raise CheckpointFormatError(f"{path}: unerwartete Daten nach dem letzten Eintrag")
    return state, metadata
