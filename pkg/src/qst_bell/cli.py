"""Command-line entry point for qst-bell.

Subcommands:
    states show       bases, intermediate grid, overlaps and fire probabilities
    game simulate     Monte-Carlo rounds of the targeting game
    game estimate     Monte-Carlo estimate of B_d from game rounds
    bell exact        exact B_d against the local bound
    bell operator     Bell operator trace and spectrum
    bell seesaw       see-saw ascent from random states
    bell lhv          local hidden variable maximum
    bell sweep        B_d and the local bound across dimensions
    bell perturb      random kicks of Alice's effects

Exit codes: 0 success, 2 usage error, 3 numerical validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from qst_bell.bell.inequality import bell_operator, dimension_sweep, exact_report, perturbation_check, quantum_limit
from qst_bell.bell.lhv import analytic_max, enumerate_max, sample_max
from qst_bell.bell.seesaw import seesaw_verify
from qst_bell.game.targeting import TargetingGame, create_policy
from qst_bell.quantum.linalg import eigensolver, fidelity
from qst_bell.quantum.states import check_dimension, max_entangled
from qst_bell.reporting.serializer import (
    FORMATS,
    Report,
    bell_report,
    emit,
    estimate_report,
    game_report,
    lhv_report,
    operator_report,
    perturbation_report,
    seesaw_report,
    states_report,
    sweep_report,
)
from qst_bell.utils.config import AppConfig, load_config
from qst_bell.utils.errors import DomainError, QstBellError, ValidationError
from qst_bell.utils.logging import setup_logging

logger = logging.getLogger("qst_bell.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3

_TOLERANCE_FLAGS = {
    "tol_normalization": "normalization_tol",
    "tol_hermitian": "hermitian_tol",
    "tol_eigen_residual": "eigen_residual_tol",
    "tol_jacobi": "jacobi_tol",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved options of one invocation."""

    command: str
    d: int = 3
    seed: int = 0
    rounds: int | None = None
    dims: tuple[int, ...] = ()
    tolerances: dict[str, float] = field(default_factory=dict)
    output: str = "text"
    out_path: Path | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.d < 2:
            raise DomainError(f"--d must be at least 2, got {self.d}")
        if self.rounds is not None and self.rounds < 1:
            raise DomainError(f"--rounds must be at least 1, got {self.rounds}")
        if self.command == "bell sweep" and not self.dims:
            raise DomainError("--dims needs at least one dimension")
        if self.output not in FORMATS:
            raise DomainError(f"unknown output format {self.output}")


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--dims expects comma-separated integers, got {text!r}") from exc
    if not dims:
        raise argparse.ArgumentTypeError("--dims needs at least one dimension")
    return dims


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=3, help="Local dimension d (default 3).")
    common.add_argument("--seed", type=int, help="64-bit unsigned seed. Overrides config.")
    common.add_argument("--json", action="store_const", const="json", dest="output", help="Emit JSON.")
    common.add_argument("--format", choices=FORMATS, dest="output", help="Output format. Overrides config.")
    common.add_argument("--out-path", type=Path, help="Write the result to this file instead of stdout.")
    common.add_argument("--threads", type=int, help="Worker threads. Falls back to QSTBELL_THREADS.")
    common.add_argument("--config", type=Path, help="Path to a custom settings.yaml.")
    common.add_argument("--log-level", help="Logging level. Overrides config.")
    for flag, name in _TOLERANCE_FLAGS.items():
        common.add_argument(f"--{flag.replace('_', '-')}", type=float, help=f"Override linalg.{name}.")
    return common


def _build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="qst-bell", description="Quantum state targeting and the B_d Bell sum")
    groups = parser.add_subparsers(dest="group", required=True)

    states = groups.add_parser("states", help="Inspect the game's states").add_subparsers(dest="action", required=True)
    states.add_parser("show", parents=[common], help="Bases, intermediate grid and overlaps")

    game = groups.add_parser("game", help="Play the targeting game").add_subparsers(dest="action", required=True)
    simulate = game.add_parser("simulate", parents=[common], help="Simulate rounds")
    simulate.add_argument("--rounds", type=int, help="Number of rounds. Overrides config.")
    simulate.add_argument("--policy", choices=["max_control", "swapped"], default="max_control")
    estimate = game.add_parser("estimate", parents=[common], help="Estimate B_d from rounds")
    estimate.add_argument("--rounds", type=int, help="Number of rounds. Overrides config.")

    bell = groups.add_parser("bell", help="Evaluate the Bell sum").add_subparsers(dest="action", required=True)
    exact = bell.add_parser("exact", parents=[common], help="Exact B_d and local bound")
    exact.add_argument("--lhv-mode", choices=["auto", "enumerate", "analytic"], default="auto")
    exact.add_argument("--groups", action="store_true", help="Group the table by M-set and Bob basis.")
    operator = bell.add_parser("operator", parents=[common], help="Bell operator")
    operator.add_argument("--eigs", action="store_true", help="Include the full spectrum.")
    seesaw = bell.add_parser("seesaw", parents=[common], help="See-saw ascent")
    seesaw.add_argument("--trials", type=int, help="Number of random starts. Overrides config.")
    lhv = bell.add_parser("lhv", parents=[common], help="Local hidden variable maximum")
    lhv.add_argument("--mode", choices=["enumerate", "analytic", "sample"], default="enumerate")
    lhv.add_argument("--samples", type=int, help="Random strategies for --mode sample. Overrides config.")
    sweep = bell.add_parser("sweep", parents=[common], help="Dimension sweep")
    sweep.add_argument("--dims", type=_parse_dims, default=(2, 3, 4), help="Comma-separated list, e.g. 2,3,4.")
    sweep.add_argument("--out", choices=FORMATS, dest="output", help="Output format (alias of --format).")
    sweep.add_argument("--lhv-mode", choices=["auto", "enumerate", "analytic"], default="auto")
    perturb = bell.add_parser("perturb", parents=[common], help="Random kicks of Alice's effects")
    perturb.add_argument("--samples", type=int, help="Number of kicks. Overrides config.")
    perturb.add_argument("--scale", type=float, help="Max kick norm. Overrides config.")
    return parser


def _apply_tolerances(config: AppConfig, tolerances: dict[str, float]) -> AppConfig:
    if not tolerances:
        return config
    return dataclasses.replace(config, linalg=dataclasses.replace(config.linalg, **tolerances))


def _run_config(args: argparse.Namespace, config: AppConfig) -> RunConfig:
    command = f"{args.group} {args.action}"
    tolerances = {
        name: getattr(args, flag) for flag, name in _TOLERANCE_FLAGS.items() if getattr(args, flag) is not None
    }
    rounds = getattr(args, "rounds", None)
    if args.group == "game" and rounds is None:
        rounds = config.game.default_rounds
    return RunConfig(
        command=command,
        d=args.d,
        seed=config.game.default_seed if args.seed is None else args.seed,
        rounds=rounds,
        dims=tuple(getattr(args, "dims", ()) or ()),
        tolerances=tolerances,
        output=args.output or config.output.format,
        out_path=args.out_path,
        threads=max(1, args.threads) if args.threads is not None else config.runtime.threads,
    )


def _execute(args: argparse.Namespace, run: RunConfig, config: AppConfig) -> Report:
    command = run.command
    if command == "bell sweep":
        for d in run.dims:
            check_dimension(d, config.states.max_d)
        return sweep_report(dimension_sweep(run.dims, lhv_mode=args.lhv_mode, config=config, threads=run.threads))

    d = check_dimension(run.d, config.states.max_d)

    if command == "states show":
        return states_report(d)

    if command == "game simulate":
        game = TargetingGame(d, config.game, create_policy(args.policy), config.states)
        return game_report(game.simulate(run.rounds, run.seed))

    if command == "game estimate":
        game = TargetingGame(d, config.game, states_config=config.states)
        return estimate_report(game.estimate_bell_value(run.rounds, run.seed), quantum_limit(d))

    if command == "bell exact":
        return bell_report(exact_report(d, lhv_mode=args.lhv_mode, config=config), groups=args.groups)

    if command == "bell operator":
        operator = bell_operator(d)
        trace = float(operator.trace().real)
        if not args.eigs:
            return operator_report(d, None, trace, None)
        decomposition = eigensolver(config.linalg)(operator)
        overlap = fidelity(decomposition.top_vector, max_entangled(d))
        return operator_report(d, decomposition, trace, overlap)

    if command == "bell seesaw":
        result = seesaw_verify(
            d,
            trials=args.trials,
            seed=run.seed,
            config=config.bell,
            threads=run.threads,
            linalg=config.linalg,
        )
        return seesaw_report(result, run.seed)

    if command == "bell lhv":
        if args.mode == "enumerate":
            result = enumerate_max(d, max_d=config.lhv.exhaustive_max_d, threads=run.threads)
        elif args.mode == "analytic":
            result = analytic_max(d)
        else:
            result = sample_max(d, n=args.samples or config.lhv.sample_size, seed=run.seed)
        return lhv_report(result)

    if command == "bell perturb":
        result = perturbation_check(
            d, samples=args.samples, scale=args.scale, seed=run.seed, config=config.bell, linalg=config.linalg
        )
        return perturbation_report(result, run.seed)

    raise DomainError(f"unknown command {command}")


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run one command and write its result; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed usage to stderr
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        config = load_config(config_path=args.config)
        setup_logging(level=args.log_level or config.logging.level, log_format=config.logging.format)
        run = _run_config(args, config)
        config = _apply_tolerances(config, run.tolerances)
        logger.info(f"Running {run.command} (d={run.d}, seed={run.seed}, threads={run.threads})")
        report = _execute(args, run, config)
        emit(report, run.output, run.out_path, config.output)
    except ValidationError as exc:
        print(f"qst-bell: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except QstBellError as exc:
        print(f"qst-bell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
