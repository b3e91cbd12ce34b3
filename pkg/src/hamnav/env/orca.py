# -*- coding: utf-8 -*-

"""
ORCA (Optimal Reciprocal Collision Avoidance) für die Fußgänger.

Pro Nachbar wird aus dem abgeschnittenen Geschwindigkeitshindernis eine
Halbebene im Geschwindigkeitsraum gebaut. Die neue Geschwindigkeit ist der
Punkt im Schnitt aller Halbebenen (und der Geschwindigkeitsscheibe), der der
bevorzugten Geschwindigkeit am nächsten liegt; gelöst durch inkrementelle
lineare Programmierung. Ist der Schnitt leer, liefert das 3-D-Programm die
Geschwindigkeit mit der kleinsten maximalen Verletzung.

Konvention: Eine Linie (point, direction) ist erfüllt, wenn
det(direction, point − v) ≤ 0, d.h. v liegt links der Richtung.
Statische Nachbarn (v_pref = 0) tragen die volle Ausweichverantwortung nicht
mit; ihre Linien kommen zuerst und werden im 3-D-Programm nicht gelockert.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError, StateError
from .state import AgentState

logger = logging.getLogger(__name__)

EPSILON = 1e-5
Vec = tuple[float, float]


@dataclass(frozen=True)
class Line:
    point: Vec
    direction: Vec

    def violation(self, v: Sequence[float]) -> float:
        """> 0, wenn v die Halbebene verletzt."""
        return _det(self.direction, (self.point[0] - v[0], self.point[1] - v[1]))


@dataclass(frozen=True)
class OrcaResult:
    velocity: np.ndarray
    lines: tuple[Line, ...]
    feasible: bool


# --- Vektorhilfen ---
def _det(a: Vec, b: Vec) -> float:
    return a[0] * b[1] - a[1] * b[0]


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1]


def _add(a: Vec, b: Vec, s: float = 1.0) -> Vec:
    return (a[0] + s * b[0], a[1] + s * b[1])


def _normalize(a: Vec) -> Vec:
    n = math.hypot(*a)
    return (a[0] / n, a[1] / n)


# --- Halbebenen ---
def orca_line(agent: AgentState, other: AgentState, horizon: float, T_step: float, margin: float = 0.0) -> Line:
    """Halbebene, die `agent` gegenüber `other` einhalten muss."""
    rel_p = (other.p[0] - agent.p[0], other.p[1] - agent.p[1])
    rel_v = (agent.v[0] - other.v[0], agent.v[1] - other.v[1])
    dist_sq = _dot(rel_p, rel_p)
    r = agent.rho + other.rho + margin
    r_sq = r * r
    inv_h = 1.0 / horizon
    if dist_sq > r_sq:
        w = (rel_v[0] - inv_h * rel_p[0], rel_v[1] - inv_h * rel_p[1])
        w_len_sq = _dot(w, w)
        dot1 = _dot(w, rel_p)
        if dot1 < 0.0 and dot1 * dot1 > r_sq * w_len_sq:
            # Projektion auf den Abschneidekreis
            w_len = math.sqrt(w_len_sq)
            unit_w = (w[0] / w_len, w[1] / w_len)
            direction = (unit_w[1], -unit_w[0])
            u = ((r * inv_h - w_len) * unit_w[0], (r * inv_h - w_len) * unit_w[1])
        else:
            # Projektion auf einen Schenkel
            leg = math.sqrt(dist_sq - r_sq)
            if _det(rel_p, w) > 0.0:
                direction = (
                    (rel_p[0] * leg - rel_p[1] * r) / dist_sq,
                    (rel_p[0] * r + rel_p[1] * leg) / dist_sq,
                )
            else:
                direction = (
                    -(rel_p[0] * leg + rel_p[1] * r) / dist_sq,
                    -(-rel_p[0] * r + rel_p[1] * leg) / dist_sq,
                )
            dot2 = _dot(rel_v, direction)
            u = (dot2 * direction[0] - rel_v[0], dot2 * direction[1] - rel_v[1])
    else:
        # Bereits überlappend: innerhalb eines Zeitschritts auflösen
        inv_dt = 1.0 / T_step
        w = (rel_v[0] - inv_dt * rel_p[0], rel_v[1] - inv_dt * rel_p[1])
        w_len = math.hypot(*w)
        if w_len < EPSILON:
            w, w_len = (0.0, -1.0), 1.0
        unit_w = (w[0] / w_len, w[1] / w_len)
        direction = (unit_w[1], -unit_w[0])
        u = ((r * inv_dt - w_len) * unit_w[0], (r * inv_dt - w_len) * unit_w[1])
    share = 1.0 if other.is_static else 0.5
    point = (agent.v[0] + share * u[0], agent.v[1] + share * u[1])
    return Line(point=point, direction=direction)


# --- Lineare Programme ---
def _lp1(lines: Sequence[Line], line_no: int, radius: float, opt: Vec, direction_opt: bool) -> Vec | None:
    line = lines[line_no]
    dot = _dot(line.point, line.direction)
    disc = dot * dot + radius * radius - _dot(line.point, line.point)
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    t_left, t_right = -dot - sq, -dot + sq
    for i in range(line_no):
        denom = _det(line.direction, lines[i].direction)
        numer = _det(lines[i].direction, (line.point[0] - lines[i].point[0], line.point[1] - lines[i].point[1]))
        if abs(denom) <= EPSILON:
            if numer < 0.0:
                return None
            continue
        t = numer / denom
        if denom >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return None
    if direction_opt:
        t = t_right if _dot(opt, line.direction) > 0.0 else t_left
    else:
        t = _dot(line.direction, (opt[0] - line.point[0], opt[1] - line.point[1]))
        t = min(max(t, t_left), t_right)
    return _add(line.point, line.direction, t)


def _lp2(lines: Sequence[Line], radius: float, opt: Vec, direction_opt: bool) -> tuple[int, Vec]:
    if direction_opt:
        result = (opt[0] * radius, opt[1] * radius)
    elif _dot(opt, opt) > radius * radius:
        n = _normalize(opt)
        result = (n[0] * radius, n[1] * radius)
    else:
        result = opt
    for i, line in enumerate(lines):
        if line.violation(result) > 0.0:
            candidate = _lp1(lines, i, radius, opt, direction_opt)
            if candidate is None:
                return i, result
            result = candidate
    return len(lines), result


def _lp3(lines: Sequence[Line], n_fixed: int, begin: int, radius: float, result: Vec) -> Vec:
    distance = 0.0
    for i in range(begin, len(lines)):
        if lines[i].violation(result) > distance:
            projected = list(lines[:n_fixed])
            for j in range(n_fixed, i):
                det = _det(lines[i].direction, lines[j].direction)
                if abs(det) <= EPSILON:
                    if _dot(lines[i].direction, lines[j].direction) > 0.0:
                        continue
                    point = (0.5 * (lines[i].point[0] + lines[j].point[0]), 0.5 * (lines[i].point[1] + lines[j].point[1]))
                else:
                    offset = (lines[i].point[0] - lines[j].point[0], lines[i].point[1] - lines[j].point[1])
                    point = _add(lines[i].point, lines[i].direction, _det(lines[j].direction, offset) / det)
                direction = _normalize((lines[j].direction[0] - lines[i].direction[0], lines[j].direction[1] - lines[i].direction[1]))
                projected.append(Line(point, direction))
            previous = result
            failed, result = _lp2(projected, radius, (-lines[i].direction[1], lines[i].direction[0]), True)
            if failed < len(projected):
                result = previous
            distance = lines[i].violation(result)
    return result


def solve_orca(lines: Sequence[Line], preferred: Sequence[float], max_speed: float, n_fixed: int = 0) -> OrcaResult:
    """Nächstgelegene zulässige Geschwindigkeit zu `preferred` innerhalb von ‖v‖ ≤ max_speed."""
    opt = (float(preferred[0]), float(preferred[1]))
    failed, result = _lp2(lines, max_speed, opt, False)
    feasible = failed == len(lines)
    if not feasible:
        logger.debug("ORCA unzulässig ab Linie %d von %d, 3-D-Programm", failed, len(lines))
        result = _lp3(lines, n_fixed, failed, max_speed, result)
    return OrcaResult(velocity=np.array(result), lines=tuple(lines), feasible=feasible)


def preferred_velocity(agent: AgentState, T_step: float) -> np.ndarray:
    """v_pref in Zielrichtung, ohne über das Ziel hinauszuschießen."""
    offset = agent.g - agent.p
    dist = float(np.linalg.norm(offset))
    if dist < 1e-12:
        return np.zeros(2)
    speed = min(agent.v_pref, dist / T_step)
    return offset * (speed / dist)


def orca_velocity(
    agent: AgentState,
    neighbors: Sequence[AgentState],
    horizon: float,
    T_step: float,
    *,
    horizon_static: float | None = None,
    neighbor_dist: float = math.inf,
    max_neighbors: int | None = None,
    margin: float = 0.0,
    preferred: np.ndarray | None = None,
) -> OrcaResult:
    """
    Neue Geschwindigkeit für `agent`; `neighbors` enthält `agent` nicht.

    Es zählen die `max_neighbors` nächsten Nachbarn innerhalb `neighbor_dist`.
    """
    if horizon <= 0:
        raise ConfigError("Zeithorizont muss positiv sein")
    if any(n is agent for n in neighbors):
        raise StateError("Nachbarliste enthält den Agenten selbst")
    ranked = sorted(
        ((float(np.linalg.norm(n.p - agent.p)), idx, n) for idx, n in enumerate(neighbors)),
        key=lambda item: (item[0], item[1]),
    )
    ranked = [item for item in ranked if item[0] < neighbor_dist]
    if max_neighbors is not None:
        ranked = ranked[:max_neighbors]
    statics = [n for _, _, n in ranked if n.is_static]
    movers = [n for _, _, n in ranked if not n.is_static]
    lines = [orca_line(agent, n, horizon_static or horizon, T_step, margin) for n in statics]
    lines += [orca_line(agent, n, horizon, T_step, margin) for n in movers]
    pref = preferred_velocity(agent, T_step) if preferred is None else np.asarray(preferred, float)
    return solve_orca(lines, pref, agent.v_pref, n_fixed=len(statics))
