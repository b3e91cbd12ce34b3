# -*- coding: utf-8 -*-

"""
Die gelernte Roboterpolicy und ihr Kritiker.

Pro Schritt:

1. Beobachtungsfenster -> Encoder -> gelernte Terme (J_θ, R_θ, ∇H_θ).
2. PH-Policy-Kopf: Steuerkraft u aus den Paarblöcken und dem nominalen System.
3. Ein Euler-Schritt der nominalen Strecke unter u liefert die PH-Aktion a_ph
   (Geschwindigkeit).
4. Leapfrog-Diffusion um a_ph, κ bedingte Rückwärtsschritte, Kandidatenmittel.

Für PPO ist π_θ(a|s) eine Normalverteilung um dieses Mittel mit gelernter,
zustandsunabhängiger log-Streuung. Das Diffusionsrauschen eines Schritts wird
aus einem gespeicherten Seed neu erzeugt, das Mittel ist damit unter einem
unveränderten Parameterstand reproduzierbar.
"""

# --- 1. Importe ---
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Protocol, Sequence

import numpy as np
from numpy.typing import NDArray

from ..config import AppSettings, EnvConfig, load_settings
from ..diffusion import LeapfrogDiffusion, clip_norm, condition_vector, sample_policy
from ..encoder import LearnedHamiltonian, ObservationWindow, STEncoder
from ..env.state import WorldState
from ..errors import CheckpointFormatError, PolicyMismatchError, StateError
from ..nn import tensor as T
from ..nn.checkpoint import load_checkpoint, save_checkpoint
from ..nn.layers import MLP, Module
from ..nn.params import ParamStore
from ..nn.tensor import Tensor, no_grad
from ..ph import NominalSystem, PairwiseTerms, PHTerms, discretize_step, open_loop_dynamics, ph_policy_head

Array = NDArray[np.float64]
Mode = Literal["train", "eval"]
LOG_2PI = math.log(2.0 * math.pi)
CRITIC_PREFIX = "critic."


# --- 2. Schnittstelle ---
@dataclass(frozen=True)
class ActionRecord:
    """Ergebnis eines Policy-Aufrufs; die Zusatzfelder braucht nur das Training."""

    action: Array
    raw: Array | None = None
    log_prob: float = 0.0
    noise_seed: int | None = None
    window: ObservationWindow | None = None
    condition: Array | None = None


class RobotPolicy(Protocol):
    name: str

    def check_compatible(self, env: EnvConfig) -> None: ...

    def act(self, history: Sequence[WorldState], rng: np.random.Generator, mode: Mode = "eval") -> ActionRecord: ...


# --- 3. Merkmale ---
def observation_window(history: Sequence[WorldState], steps: int) -> ObservationWindow:
    """Die letzten `steps` Zustände als [N, T, 8]; fehlende frühe Schritte wiederholen den ersten."""
    if not history:
        raise StateError("leere Historie")
    frames = list(history[-steps:])
    frames = [frames[0]] * (steps - len(frames)) + frames
    per_step = []
    for state in frames:
        rows = [state.robot.full()] + [np.concatenate([h.public(), np.zeros(3)]) for h in state.humans]
        per_step.append(np.stack(rows))
    entries = np.stack(per_step, axis=1)
    return ObservationWindow(entries, np.ones(entries.shape[0], dtype=bool))


def critic_features(state: WorldState, neighbors: int) -> Array:
    """Roboterzentrierter Vektor fester Länge: Ziel, Geschwindigkeit, die nächsten Fußgänger."""
    robot = state.robot
    offset = robot.g - robot.p
    parts = [offset, [np.linalg.norm(offset)], robot.v]
    ranked = sorted(state.humans, key=lambda h: float(np.linalg.norm(h.p - robot.p)))[:neighbors]
    block = np.zeros((neighbors, 6))
    for i, h in enumerate(ranked):
        gap = float(np.linalg.norm(h.p - robot.p)) - h.rho - robot.rho
        block[i] = [*(h.p - robot.p), *h.v, gap, 1.0]
    return np.concatenate([np.concatenate(parts), block.reshape(-1)])


def critic_width(neighbors: int) -> int:
    return 5 + 6 * neighbors


# --- 4. Gelernte Policy ---
class HamiltonianPolicy:
    name = "hamnav"

    def __init__(self, settings: AppSettings, store: ParamStore | None = None):
        self.settings = settings
        self.store = store or ParamStore(settings.train.seed)
        self.variant = settings.policy.variant
        self.encoder = STEncoder(self.store, settings.encoder)
        self.diffusion = LeapfrogDiffusion(self.store, settings.diffusion, settings.encoder.d_model)
        self.log_std = self.store.create("policy.log_std", (2,), "constant", settings.policy.init_log_std).name
        self.window_steps = settings.encoder.window
        self.dt = settings.env.dt
        self.v_pref = settings.env.robot_v_pref
        fixed = settings.diffusion.condition
        self.fixed_condition = None if fixed is None else np.asarray(fixed, dtype=np.float64)

    def clone(self) -> "HamiltonianPolicy":
        """Schreibgeschützte Momentaufnahme für Rollout-Worker."""
        return HamiltonianPolicy(self.settings, self.store.clone())

    def check_compatible(self, env: EnvConfig) -> None:
        if not math.isclose(env.robot_v_pref, self.v_pref) or not math.isclose(env.dt, self.dt):
            raise PolicyMismatchError(
                f"Policy für v_pref={self.v_pref}, dt={self.dt} trainiert, Szenario hat v_pref={env.robot_v_pref}, dt={env.dt}"
            )

    def condition(self, state: WorldState) -> Array:
        if self.fixed_condition is not None:
            return self.fixed_condition
        robot = state.robot
        statics = [h for h in state.humans if h.is_static]
        nearest = min((float(np.linalg.norm(h.p - robot.p)) - h.rho - robot.rho for h in statics), default=0.0)
        return condition_vector(robot.g - robot.p, self.settings.reward.social_distance, len(statics), nearest)

    def nominal(self, goal: Array) -> NominalSystem:
        cfg = self.settings.policy
        return NominalSystem(mass=cfg.mass, goal=goal, stiffness=cfg.stiffness, damping=cfg.damping)

    # --- Vorwärtsrechnung ---
    def control(self, window: ObservationWindow, learned: LearnedHamiltonian) -> tuple[Array, Tensor, PHTerms]:
        """(x_r, u, nominale Terme) des PH-Kopfs für ein gestapeltes Fenster."""
        states = window.states()
        nominal = self.nominal(window.robot_goal())
        x_r = nominal.state(states[..., 0, :2], states[..., 0, 2:4])
        terms = nominal.terms(x_r)
        theta = PairwiseTerms(learned.J_blocks, learned.R_blocks, learned.grad_h, visible=window.present)
        return x_r, ph_policy_head(states, theta, terms), terms

    def ph_action(self, window: ObservationWindow, create_graph: bool = False) -> tuple[Tensor, Tensor]:
        """(a_ph [B, 2], Kontext [B, d]) für ein gestapeltes Fenster."""
        features, learned = self.encoder(window, create_graph=create_graph)
        context = T.mean(features.Y_F[..., 0, :, :], axis=-2)
        if self.variant == "diffusion_only":
            return Tensor(np.zeros((*window.entries.shape[:-3], 2))), context
        x_r, u, terms = self.control(window, learned)
        x_next = discretize_step(x_r, u, self.dt, lambda s, a: open_loop_dynamics(s, a, terms))
        return x_next[..., 2:4] * (1.0 / self.settings.policy.mass), context

    def mean_action(
        self,
        window: ObservationWindow,
        condition: Array,
        init_noise: Array,
        step_noise: Array,
        create_graph: bool = False,
    ) -> Tensor:
        """Auswertungsmittel der Policy, ‖·‖ ≤ v_pref; alle Eingaben mit Batchachse."""
        a_ph, context = self.ph_action(window, create_graph)
        if self.variant == "ph_only":
            return clip_norm(a_ph, self.v_pref)
        candidates = self.diffusion(a_ph, context, condition, init_noise, step_noise)
        return sample_policy(candidates, "eval", self.v_pref)

    def log_prob(self, mean: Tensor, actions: Array) -> Tensor:
        """log N(a; μ, diag(σ²)) je Zeile."""
        log_std = self.store[self.log_std]
        z = (np.asarray(actions) - mean) / T.exp(log_std)
        return T.sum_(T.square(z), axis=-1) * -0.5 - T.sum_(log_std) - LOG_2PI

    def noise_for(self, noise_seeds: Sequence[int]) -> tuple[Array, Array]:
        draws = [self.diffusion.draw_noise(np.random.default_rng(s)) for s in noise_seeds]
        init = np.stack([d[0] for d in draws])
        steps = np.stack([d[1] for d in draws], axis=1)
        return init, steps

    def batch_log_prob(
        self,
        windows: Sequence[ObservationWindow],
        conditions: Array,
        noise_seeds: Sequence[int],
        actions: Array,
    ) -> Tensor:
        """log π_θ(a|s) für einen Minibatch, differenzierbar nach den Parametern."""
        init, steps = self.noise_for(noise_seeds)
        mean = self.mean_action(ObservationWindow.stack(list(windows)), conditions, init, steps, create_graph=True)
        return self.log_prob(mean, actions)

    # --- Handeln ---
    def act(self, history: Sequence[WorldState], rng: np.random.Generator, mode: Mode = "eval") -> ActionRecord:
        window = observation_window(history, self.window_steps)
        cond = self.condition(history[-1])
        noise_seed = int(rng.integers(2**63 - 1))
        init, steps = self.noise_for([noise_seed])
        batched = ObservationWindow(window.entries[None], window.present[None])
        with no_grad():
            mean = self.mean_action(batched, cond[None], init, steps).data[0].copy()
        if mode == "eval":
            return ActionRecord(action=mean, noise_seed=noise_seed, window=window, condition=cond)
        std = np.exp(self.store[self.log_std].data)
        raw = mean + std * rng.standard_normal(2)
        with no_grad():
            log_prob = self.log_prob(Tensor(mean[None]), raw[None]).item()
        return ActionRecord(
            action=clip_norm(raw, self.v_pref),
            raw=raw,
            log_prob=log_prob,
            noise_seed=noise_seed,
            window=window,
            condition=cond,
        )


# --- 5. Kritiker ---
class Critic(Module):
    """V_φ über `critic_features`."""

    def __init__(self, settings: AppSettings, store: ParamStore | None = None, prefix: str = "critic"):
        store = store or ParamStore(settings.train.seed + 1)
        super().__init__(store, prefix)
        self.neighbors = settings.policy.critic_neighbors
        hidden = settings.policy.critic_hidden
        self.net = MLP(store, f"{prefix}.net", [critic_width(self.neighbors), hidden, hidden, 1])

    def features(self, state: WorldState) -> Array:
        return critic_features(state, self.neighbors)

    def __call__(self, features: Any) -> Tensor:
        out = self.net(features)
        return T.reshape(out, out.shape[:-1])

    def values(self, states: Sequence[WorldState]) -> Array:
        if not states:
            return np.zeros(0)
        with no_grad():
            return self(np.stack([self.features(s) for s in states])).data.copy()


# --- 6. Checkpoints ---
def save_policy(path: str | Path, policy: HamiltonianPolicy, critic: Critic | None = None, **metadata: Any) -> Path:
    state = policy.store.state_dict()
    if critic is not None:
        state.update(critic.store.state_dict())
    meta = {
        "kind": "hamnav-policy",
        "variant": policy.variant,
        "version": policy.store.version,
        "config": policy.settings.run_config(),
        **metadata,
    }
    return save_checkpoint(path, state, meta)


def load_policy(path: str | Path) -> tuple[HamiltonianPolicy, Critic, dict[str, Any]]:
    state, meta = load_checkpoint(path)
    if meta.get("kind") != "hamnav-policy" or "config" not in meta:
        raise CheckpointFormatError(f"{path}: kein Policy-Checkpoint")
    settings = load_settings(**meta["config"])
    policy = HamiltonianPolicy(settings)
    critic = Critic(settings)
    actor_state = {k: v for k, v in state.items() if not k.startswith(CRITIC_PREFIX)}
    critic_state = {k: v for k, v in state.items() if k.startswith(CRITIC_PREFIX)}
    policy.store.load_state_dict(actor_state)
    if critic_state:
        critic.store.load_state_dict(critic_state)
    policy.store.version = int(meta.get("version", 0))
    return policy, critic, meta
