# -*- coding: utf-8 -*-

"""
Kommandozeile `hamnav`.

    hamnav simulate --seed 3 --policy orca --out ep.csv
    hamnav train --config run.yaml --out runs/a
    hamnav eval --checkpoint runs/a/policy.ckpt --episodes 500
    hamnav render ep.csv --out ep.svg
    hamnav audit --checkpoint runs/a/policy.ckpt --episodes 10
    hamnav serve --port 8000

Exit-Codes: 0 Erfolg, 1 Aufruf- oder Konfigurationsfehler, 2 Laufzeitfehler.
"""

# --- 1. Importe ---
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .__about__ import __version__
from .config import AppSettings, load_settings
from .errors import ConfigError, HamnavError
from .log import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
BASELINE_CHOICES = ("orca", "sf", "straight", "zero")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# --- 2. Argumente ---
def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML-Laufkonfiguration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--humans", type=int, help="Anzahl Fußgänger (überschreibt env.n_humans)")
    p.add_argument("--ped-policy", choices=["orca", "sf", "mixed"], help="Fußgängermodell")


def _policy_args(p: argparse.ArgumentParser, default: str | None) -> None:
    p.add_argument("--checkpoint", type=Path, help="gelernte Policy laden")
    p.add_argument("--policy", choices=BASELINE_CHOICES, default=default, help="regelbasierte Roboterpolicy")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hamnav", description="Sozial verträgliche Roboternavigation mit Port-Hamilton-Policy.")
    parser.add_argument("--version", action="version", version=f"hamnav {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="eine geseedete Episode als Trajektoriendatei")
    _common(p)
    _policy_args(p, "orca")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("train", help="PPO-Training; Checkpoint und Metrikprotokoll")
    _common(p)
    p.add_argument("--episodes", type=int, help="Gesamtzahl Trainingsepisoden")
    p.add_argument("--out", type=Path, required=True, help="Ausgabeverzeichnis")

    p = sub.add_parser("eval", help="Stapelauswertung")
    _common(p)
    _policy_args(p, None)
    p.add_argument("--episodes", type=int, help="Anzahl Episoden (Standard eval.n_runs)")
    p.add_argument("--out", type=Path, help="Episodentabelle (TSV)")

    p = sub.add_parser("render", help="Trajektoriendatei als SVG")
    p.add_argument("trajectory", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--arena-size", type=float, default=20.0)

    p = sub.add_parser("audit", help="Energiebilanz je Schritt")
    _common(p)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--episodes", type=int, default=1)
    p.add_argument("--out", type=Path, help="Energietabelle (TSV)")

    p = sub.add_parser("serve", help="HTTP-Schnittstelle unter uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def settings_from_args(args: argparse.Namespace) -> AppSettings:
    env: dict[str, Any] = {}
    if getattr(args, "humans", None) is not None:
        env["n_humans"] = args.humans
    if getattr(args, "ped_policy", None) is not None:
        env["ped_policy"] = args.ped_policy
    overrides: dict[str, Any] = {"env": env, "train": {"seed": args.seed}}
    episodes = getattr(args, "episodes", None)
    if episodes is not None and args.command == "train":
        overrides["train"]["total_episodes"] = episodes
    if episodes is not None and args.command == "eval":
        overrides["eval"] = {"n_runs": episodes}
    return load_settings(args.config, **overrides)


def _robot(args: argparse.Namespace, settings: AppSettings):
    from .rl.baselines import BASELINES
    from .rl.policy import load_policy

    if args.checkpoint is not None:
        return load_policy(args.checkpoint)[0]
    if args.policy is None:
        raise UsageError("--checkpoint oder --policy angeben")
    return BASELINES[args.policy](settings.env)


# --- 3. Kommandos ---
def cmd_simulate(args: argparse.Namespace, settings: AppSettings) -> None:
    from .env.crowd import CrowdSim, SocialReward
    from .env.trajectory import write_trajectory
    from .rl.rollout import run_episode

    policy = _robot(args, settings)
    policy.check_compatible(settings.env)
    episode = run_episode(CrowdSim(settings.env, SocialReward(settings.reward)), policy, args.seed)
    write_trajectory(args.out, episode.states)
    print(f"{episode.done.value} nach {len(episode)} Schritten ({episode.final_state.t:.2f} s) -> {args.out}")


def cmd_train(args: argparse.Namespace, settings: AppSettings) -> None:
    from .rl.train import train

    result = train(settings, out_dir=args.out)
    print(f"{len(result.metrics)} Updates, Checkpoint: {result.checkpoint}")


def cmd_eval(args: argparse.Namespace, settings: AppSettings) -> None:
    from .evaluation.metrics import evaluate

    policy = _robot(args, settings)
    report = evaluate(policy, settings.env, settings.eval.n_runs, args.seed, settings.reward, settings.eval.workers)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text("\n".join(report.table()) + "\n", encoding="utf-8")
    print(report.summary())


def cmd_render(args: argparse.Namespace, settings: AppSettings | None = None) -> None:
    from .evaluation.render import render_trajectory

    print(render_trajectory(args.trajectory, args.out, args.arena_size))


def cmd_audit(args: argparse.Namespace, settings: AppSettings) -> None:
    from .env.crowd import CrowdSim, SocialReward
    from .evaluation.audit import audit_lines, energy_audit, energy_trace
    from .rl.policy import load_policy
    from .rl.rollout import episode_seeds, run_episode

    policy = load_policy(args.checkpoint)[0]
    policy.check_compatible(settings.env)
    sim = CrowdSim(settings.env, SocialReward(settings.reward))
    lines: list[str] = []
    violations = 0
    for seed in episode_seeds(args.seed, args.episodes):
        rows = energy_audit(energy_trace(policy, run_episode(sim, policy, seed).states))
        violations += sum(r.violation for r in rows)
        lines.extend(f"{seed}\t{line}" for line in audit_lines(rows)[1:])
    table = ["seed\t" + audit_lines([])[0], *lines]
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text("\n".join(table) + "\n", encoding="utf-8")
    else:
        print("\n".join(table))
    print(f"{len(lines)} Schritte, {violations} Verletzungen der Energiebilanz", file=sys.stderr)


def cmd_serve(args: argparse.Namespace, settings: AppSettings | None = None) -> None:
    import uvicorn

    uvicorn.run("hamnav.main:app", host=args.host, port=args.port)


COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "eval": cmd_eval,
    "render": cmd_render,
    "audit": cmd_audit,
    "serve": cmd_serve,
}


# --- 4. Einstieg ---
def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings = settings_from_args(args) if args.command not in ("render", "serve") else None
        configure_logging(settings.log_level if settings else "INFO")
        COMMANDS[args.command](args, settings)
    except (UsageError, ConfigError) as exc:
        print(f"Fehler: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HamnavError as exc:
        logger.debug("Abbruch", exc_info=True)
        print(f"Fehler: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"Fehler: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
