# -*- coding: utf-8 -*-

"""
Zeilenorientiertes Trajektorienformat.

    # hamnav trajectory
    t[s],agent_id,kind,x[m],y[m],vx[m/s],vy[m/s],radius[m]
    # goal,<id>,<gx>,<gy>
    0.000000,0,robot,0.000000,-8.000000,0.000000,0.000000,0.300000
    ...

Zahlen werden mit fester Genauigkeit geschrieben, identische Episoden ergeben
byte-identische Dateien.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import TrajectoryParseError
from .state import WorldState

TITLE = "# hamnav trajectory"
HEADER = "t[s],agent_id,kind,x[m],y[m],vx[m/s],vy[m/s],radius[m]"
KINDS = ("robot", "human", "static")
_FMT = "{:.6f}"


@dataclass
class AgentTrack:
    kind: str
    rows: list[tuple[float, float, float, float, float, float]] = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows])

    @property
    def positions(self) -> np.ndarray:
        return np.array([r[1:3] for r in self.rows]).reshape(-1, 2)

    @property
    def velocities(self) -> np.ndarray:
        return np.array([r[3:5] for r in self.rows]).reshape(-1, 2)

    @property
    def radius(self) -> float:
        return self.rows[-1][5]


@dataclass
class Trajectory:
    tracks: dict[int, AgentTrack]
    goals: dict[int, tuple[float, float]]


def trajectory_lines(states: Sequence[WorldState]) -> list[str]:
    lines = [TITLE, HEADER]
    if states:
        first = states[0]
        agents = [first.robot, *first.humans]
        for agent_id, agent in enumerate(agents):
            if agent.kind != "static":
                lines.append("# goal,{},{},{}".format(agent_id, _FMT.format(agent.g[0]), _FMT.format(agent.g[1])))
    for state in states:
        for agent_id, agent in enumerate([state.robot, *state.humans]):
            values = [state.t, *agent.p, *agent.v, agent.rho]
            nums = [_FMT.format(v + 0.0) for v in values]
            lines.append(",".join([nums[0], str(agent_id), agent.kind, *nums[1:]]))
    return lines


def write_trajectory(path: str | Path, states: Sequence[WorldState]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(trajectory_lines(states)) + "\n", encoding="utf-8")
    return path


def parse_trajectory(lines: Iterable[str]) -> Trajectory:
    tracks: dict[int, AgentTrack] = {}
    goals: dict[int, tuple[float, float]] = {}
    seen_header = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("goal,"):
                parts = body.split(",")
                try:
                    goals[int(parts[1])] = (float(parts[2]), float(parts[3]))
                except (IndexError, ValueError) as exc:
                    raise TrajectoryParseError(f"ungültige Zielzeile: {line!r}", line_no) from exc
            continue
        if not seen_header:
            if line != HEADER:
                raise TrajectoryParseError(f"Kopfzeile erwartet, gefunden {line!r}", line_no)
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise TrajectoryParseError(f"8 Felder erwartet, gefunden {len(parts)}", line_no)
        try:
            t = float(parts[0])
            agent_id = int(parts[1])
            x, y, vx, vy, radius = (float(p) for p in parts[3:])
        except ValueError as exc:
            raise TrajectoryParseError(f"Zahl nicht lesbar: {exc}", line_no) from exc
        kind = parts[2]
        if kind not in KINDS:
            raise TrajectoryParseError(f"unbekannte Agentenart {kind!r}", line_no)
        if not all(np.isfinite([t, x, y, vx, vy, radius])) or radius <= 0:
            raise TrajectoryParseError("nicht-endliche Werte oder Radius ≤ 0", line_no)
        track = tracks.setdefault(agent_id, AgentTrack(kind))
        if track.kind != kind:
            raise TrajectoryParseError(f"Agent {agent_id} wechselt die Art", line_no)
        if track.rows and t < track.rows[-1][0]:
            raise TrajectoryParseError(f"Zeit läuft für Agent {agent_id} rückwärts", line_no)
        track.rows.append((t, x, y, vx, vy, radius))
    if not seen_header:
        raise TrajectoryParseError("Kopfzeile fehlt", 1)
    return Trajectory(tracks=dict(sorted(tracks.items())), goals=goals)


def read_trajectory(path: str | Path) -> Trajectory:
    with open(path, encoding="utf-8") as fh:
        return parse_trajectory(fh)
