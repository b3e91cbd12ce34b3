# -*- coding: utf-8 -*-

"""
Zentrale Fehlerhierarchie von hamnav.

Alle fachlichen Fehler erben von `HamnavError`. Die CLI und die HTTP-Schicht
übersetzen diese Klassen in Exit-Codes bzw. HTTP-Statuscodes; Bibliothekscode
wirft ausschließlich diese Typen.
"""

from typing import Any, Sequence


class HamnavError(Exception):
    """Basisklasse aller hamnav-Fehler."""


class ConfigError(HamnavError, ValueError):
    """Ungültige Konfiguration (Datei, Umgebungsvariablen oder Flags)."""


# --- Tensor-Substrat ---
class DimensionError(HamnavError, ValueError):
    """Formen passen nicht zusammen."""

    def __init__(self, message: str, *shapes: Sequence[int]):
        if shapes:
            message = f"{message} (Formen: {', '.join(str(tuple(s)) for s in shapes)})"
        super().__init__(message)
        self.shapes = tuple(tuple(s) for s in shapes)


class NonFiniteError(HamnavError, ValueError):
    """NaN oder Inf in einem Tensor oder einer Ableitung."""


class GraphError(HamnavError, RuntimeError):
    """Rückwärtsdurchlauf auf einem ungeeigneten Graphen (z.B. nicht-skalarer Verlust)."""


class AttentionMaskError(HamnavError, ValueError):
    """Eine Query-Zeile ist vollständig maskiert; Softmax undefiniert."""


# --- Port-Hamilton-Algebra ---
class SingularityError(HamnavError, ArithmeticError):
    """G hat keinen vollen Spaltenrang bzw. ist zu schlecht konditioniert."""

    def __init__(self, message: str, smallest_singular_value: float):
        super().__init__(f"{message} (kleinster Singulärwert: {smallest_singular_value:.3e})")
        self.smallest_singular_value = smallest_singular_value


class IntegrationError(HamnavError, ArithmeticError):
    """Nicht-endliche Zustandsableitung während der Integration."""


class MissingPairBlockError(HamnavError, KeyError):
    """Für sichtbare Agenten fehlen gelernte Paarblöcke."""

    def __init__(self, missing: Sequence[int]):
        super().__init__(f"Paarblöcke fehlen für Agentenindizes {list(missing)}")
        self.missing = list(missing)


class PHStructureError(HamnavError, ValueError):
    """J nicht schiefsymmetrisch, R nicht positiv semidefinit oder unzulässige Systemparameter."""


class ScheduleError(HamnavError, ValueError):
    """Diffusionsschritt außerhalb des Fahrplans."""


class SamplingError(HamnavError, ValueError):
    """Unzulässiger Aufruf der Kandidatenauswahl."""


# --- Umgebung ---
class StateError(HamnavError, ValueError):
    """Ungültiger Agenten- oder Weltzustand bzw. ungültiges Beobachtungsfenster."""


class ScenarioError(HamnavError, RuntimeError):
    """Szenario konnte nicht erzeugt werden (z.B. Platzierung gescheitert)."""


class EpisodeDoneError(HamnavError, RuntimeError):
    """`step` wurde nach Episodenende aufgerufen."""


class TrajectoryParseError(HamnavError, ValueError):
    """Fehlerhafte Zeile in einer Trajektoriendatei."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"Zeile {line_no}: {message}")
        self.line_no = line_no


# --- Training / Evaluation ---
class CheckpointFormatError(HamnavError, ValueError):
    """Checkpoint-Datei mit unbekannter Signatur oder Version."""


class EvaluationError(HamnavError, ValueError):
    """Auswertung ohne oder mit unvollständigen Episoden."""


class PolicyMismatchError(HamnavError, ValueError):
    """Policy und Szenario-Konfiguration sind nicht kompatibel."""


class NonFiniteRatioError(HamnavError, ArithmeticError):
    """PPO-Wahrscheinlichkeitsverhältnis nicht endlich; Batch wird verworfen."""

    def __init__(self, message: str, diagnostics: dict[str, Any]):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


class TrainingDivergedError(HamnavError, RuntimeError):
    """Verlust wurde NaN; das Training wurde mit dem letzten guten Checkpoint abgebrochen."""
