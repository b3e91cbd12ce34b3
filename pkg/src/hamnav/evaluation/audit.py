# -*- coding: utf-8 -*-

"""
Energiebilanz je aufgezeichnetem Schritt.

Ḣ wird aus dem Übergang gemessen, (H(x_{t+1}) − H(x_t))/T, mit der nominalen
Roboterenergie, die der PH-Kopf formt. Die zugeführte Leistung setzt sich aus
dem Geschwindigkeitssprung zu Schrittbeginn und der Haltekraft über den
Schritt zusammen; letztere und die Dissipation liefert `power_balance` im
Intervallzustand (p̄, π_{t+1}). Das Residuum ist der Anteil von Ḣ, den der
Eingang nicht erklärt. Ein Schritt ist verletzt, wenn Ḣ > uᵀy + tol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..encoder import ObservationWindow
from ..env.state import WorldState
from ..nn.tensor import no_grad
from ..ph import NominalSystem, power_balance, pseudo_inverse
from ..rl.policy import HamiltonianPolicy, observation_window

AUDIT_TOL = 1e-6
AUDIT_HEADER = "step\tH\tHdot\tsupplied\tdissipated\tresidual\tcommanded\tviolation"


@dataclass(frozen=True)
class TraceStep:
    """Ein aufgezeichneter Übergang x → x_next im Zustand (p, π) von `system`."""

    x: np.ndarray
    x_next: np.ndarray
    dt: float
    system: NominalSystem
    u_cmd: np.ndarray


@dataclass(frozen=True)
class AuditRow:
    step: int
    H: float
    hdot: float
    supplied: float
    dissipated: float
    residual: float
    commanded: float
    violation: bool

    def line(self) -> str:
        values = (self.H, self.hdot, self.supplied, self.dissipated, self.residual, self.commanded)
        return "\t".join([str(self.step), *(f"{v:.6e}" for v in values), str(int(self.violation))])


def energy_trace(policy: HamiltonianPolicy, states: Sequence[WorldState]) -> list[TraceStep]:
    """Robotertransitionen der Episode samt der PH-Steuerkraft, die die Policy in x_t befiehlt."""
    trace = []
    for i in range(len(states) - 1):
        before, after = states[i].robot, states[i + 1].robot
        window = observation_window(states[: i + 1], policy.window_steps)
        batched = ObservationWindow(window.entries[None], window.present[None])
        with no_grad():
            _, learned = policy.encoder(batched)
            _, u, _ = policy.control(batched, learned)
        system = policy.nominal(before.g)
        trace.append(
            TraceStep(
                x=system.state(before.p, before.v),
                x_next=system.state(after.p, after.v),
                dt=states[i].T_step,
                system=system,
                u_cmd=np.asarray(getattr(u, "data", u))[0],
            )
        )
    return trace


def energy_audit(trace: Sequence[TraceStep], tol: float = AUDIT_TOL) -> list[AuditRow]:
    rows = []
    for step, item in enumerate(trace):
        system, d = item.system, item.system.dim
        p0, pi0 = item.x[:d], item.x[d:]
        p1, pi1 = item.x_next[:d], item.x_next[d:]
        hdot = float(system.hamiltonian(item.x_next) - system.hamiltonian(item.x)) / item.dt

        # Sprung π → π_{t+1}, bewertet mit der mittleren Geschwindigkeit
        impulse = float(np.dot((pi0 + pi1) / (2.0 * system.mass), pi1 - pi0)) / item.dt
        # Haltekraft hält π_{t+1} über den Schritt
        interval = np.concatenate([0.5 * (p0 + p1), pi1])
        terms = system.terms(interval)
        u_hold = -(pseudo_inverse(terms.G) @ terms.drift())
        balance = power_balance(interval, u_hold, terms)

        supplied = impulse + float(balance.supplied)
        dissipated = float(balance.dissipated)
        commanded = float(np.dot(item.u_cmd, system.terms(item.x).output()))
        rows.append(
            AuditRow(
                step=step,
                H=float(system.hamiltonian(item.x)),
                hdot=hdot,
                supplied=supplied,
                dissipated=dissipated,
                residual=hdot - (supplied - dissipated),
                commanded=commanded,
                violation=hdot > supplied + tol,
            )
        )
    return rows


def audit_lines(rows: Sequence[AuditRow]) -> list[str]:
    return [AUDIT_HEADER, *(r.line() for r in rows)]
