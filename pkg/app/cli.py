"""
Command-line entry point: `python -m app {verify,run,bench} ...`.

Exit statuses: 0 success, 2 usage error, 3 validation error, 4 when more than
half of the replications diverged. Tables go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.adapters.datasources.csv_store import CsvStore, CsvStoreError
from app.core.config import get_settings
from app.core.logging import get_logger, setup_logging
from app.models import (
    Algorithm,
    ExperimentPlan,
    ObjectiveKind,
    PerturbationKind,
)
from app.repositories.file_csv import FileCycleRepository, FileRecordRepository, FileTrajectoryRepository
from app.services.bench import run_experiment, table_plans
from app.services.errors import RdkwError
from app.services.perturb import build_cycle, verify_cycle
from app.services.reporting import summarize
from app.services.runs import run_single

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_DIVERGED = 4

VERIFY_TOLERANCE = 1e-10
DEFAULT_RUN_BUDGET = 2000


class FileConfig(BaseModel):
    """Flat key=value settings accepted by --config; keys mirror the long flags."""
    model_config = ConfigDict(extra="forbid")

    p: Optional[int] = Field(default=None, ge=1)
    alg: Optional[str] = None
    source: Optional[PerturbationKind] = None
    objective: Optional[ObjectiveKind] = None
    sigma: Optional[float] = Field(default=None, ge=0)
    budget: Optional[int] = Field(default=None, ge=1)
    reps: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    a: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    c: Optional[float] = Field(default=None, gt=0)
    B: Optional[float] = Field(default=None, ge=0)
    theta0: Optional[float] = None
    table: Optional[int] = Field(default=None, ge=1, le=4)
    workers: Optional[int] = Field(default=None, ge=1)
    force: Optional[bool] = None
    csv: Optional[Path] = None
    dump: Optional[Path] = None
    trajectory: Optional[Path] = None
    log_level: Optional[str] = None


def load_file_config(path: Path) -> FileConfig:
    if not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    raw = dotenv_values(path)
    values: dict[str, Any] = {}
    for key, value in raw.items():
        name = key.strip().replace("-", "_")
        name = "B" if name in ("b", "B") else name.lower()
        values[name] = value
    return FileConfig.model_validate(values)


def _algorithm(text: str) -> Algorithm:
    try:
        return Algorithm.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _algorithm_list(text: str) -> tuple[Algorithm, ...]:
    return tuple(_algorithm(part) for part in text.split(",") if part.strip())


def _bounded(kind: Callable[[str], Any], name: str, minimum: float, strict: bool = False) -> Callable[[str], Any]:
    """Argparse converter that turns out-of-range numbers into usage errors."""

    def convert(text: str) -> Any:
        try:
            value = kind(text)
        except (TypeError, ValueError) as e:
            raise argparse.ArgumentTypeError(f"invalid {name} {text!r}") from e
        if not (value > minimum if strict else value >= minimum):
            raise argparse.ArgumentTypeError(f"{name} must be {'>' if strict else '>='} {minimum:g}, got {text}")
        return value

    return convert


_dimension = _bounded(int, "dimension", 1)
_count = _bounded(int, "count", 1)
_seed = _bounded(int, "seed", 0)
_sigma = _bounded(float, "sigma", 0.0)
_offset = _bounded(float, "stability offset", 0.0)
_gain = _bounded(float, "gain constant", 0.0, strict=True)


def _schedule_fields(args: argparse.Namespace) -> dict[str, Any]:
    """Schedule flags that were given; the rest fall back to the plan or table defaults."""
    fields = {
        "a_scale": args.a,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "c": args.c,
        "B": args.B,
        "theta0_fill": args.theta0,
    }
    return {k: v for k, v in fields.items() if v is not None}


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="rdkw",
        description="Random-direction Kiefer-Wolfowitz optimisation with deterministic perturbations.",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value file with flag defaults")
    common.add_argument("--p", type=_dimension, default=10, help="parameter dimension")
    common.add_argument(
        "--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper
    )

    schedule = argparse.ArgumentParser(add_help=False)
    schedule.add_argument(
        "--objective",
        type=ObjectiveKind,
        choices=list(ObjectiveKind),
        default=ObjectiveKind.QUADRATIC,
        metavar="{quadratic,fourth-order}",
    )
    schedule.add_argument("--sigma", type=_sigma, help="noise standard deviation (default 0)")
    schedule.add_argument("--budget", type=_count, help="simulations (objective evaluations) per run")
    schedule.add_argument("--seed", type=_seed, default=0, help="seed for noise and random directions")
    schedule.add_argument("--a", type=_gain, help="step-size numerator (default 1)")
    schedule.add_argument("--alpha", type=float, help="step-size exponent (default 0.602)")
    schedule.add_argument("--gamma", type=float, help="sensitivity exponent (default 0.101)")
    schedule.add_argument("--c", type=_gain, help="sensitivity numerator (default 0.1)")
    schedule.add_argument("--B", type=_offset, help="stability offset (default 10%% of the iterations)")
    schedule.add_argument("--theta0", type=float, help="fill value of the initial point (default 1)")
    schedule.add_argument("--force", action="store_true", default=False, help="run schedules that fail the gain conditions")

    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser("verify", parents=[common], help="check a deterministic perturbation cycle")
    source = verify.add_mutually_exclusive_group()
    source.add_argument(
        "--source",
        type=PerturbationKind,
        choices=[PerturbationKind.CIRCULANT, PerturbationKind.HADAMARD],
        metavar="{circulant,hadamard}",
        help="deterministic construction to check (default: both)",
    )
    source.add_argument("--alg", type=_algorithm, help="algorithm whose perturbation source is checked")
    verify.add_argument("--dump", type=Path, help="write the perturbation matrix as CSV, one direction per line")

    run_cmd = subparsers.add_parser("run", parents=[common, schedule], help="run the optimiser once")
    run_cmd.add_argument("--alg", type=_algorithm, default=Algorithm.DSPKW_2C)
    run_cmd.add_argument("--trajectory", type=Path, help="write (n, squared error) per iteration as CSV")

    bench = subparsers.add_parser("bench", parents=[common, schedule], help="replicated NMSE benchmark")
    bench.add_argument("--alg", type=_algorithm_list, help="comma-separated algorithms")
    bench.add_argument("--table", type=int, choices=[1, 2, 3, 4], help="benchmark table preset")
    bench.add_argument("--reps", type=_count, default=100, help="replications per algorithm")
    bench.add_argument("--csv", type=Path, help="write every replication as CSV")
    bench.add_argument("--workers", type=_count, help="parallel worker processes (1 runs inline)")

    return parser, {"verify": verify, "run": run_cmd, "bench": bench}


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.config is None:
        return args

    try:
        file_config = load_file_config(args.config)
    except (OSError, ValidationError) as e:
        parser.error(f"invalid --config file: {e}")

    subparser = subparsers[args.command]
    known = {action.dest: action for action in subparser._actions}
    defaults: dict[str, Any] = {}
    for name, value in file_config.model_dump(exclude_none=True).items():
        if name not in known:
            continue
        action = known[name]
        # set_defaults values bypass the flag's type converter and choices
        if isinstance(value, str) and callable(action.type):
            try:
                value = action.type(value)
            except (argparse.ArgumentTypeError, ValueError) as e:
                parser.error(f"invalid --config value for {name}: {e}")
        if action.choices is not None and value not in action.choices:
            parser.error(f"invalid --config value for {name}: {value!r}")
        defaults[name] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(args.log_level)
    handlers = {"verify": _verify, "run": _run, "bench": _bench}
    try:
        return handlers[args.command](args)
    except (RdkwError, ValidationError, CsvStoreError) as e:
        logger.error("%s", e)
        return EXIT_VALIDATION


def _verify(args: argparse.Namespace) -> int:
    if args.source is not None:
        sources = [args.source]
    elif args.alg is not None:
        sources = [args.alg.perturbation_kind]
    else:
        sources = [PerturbationKind.CIRCULANT, PerturbationKind.HADAMARD]
    if args.dump is not None and len(sources) != 1:
        logger.error("--dump needs --source or --alg to pick a single perturbation source")
        return EXIT_USAGE

    status = EXIT_OK
    for source in sources:
        cycle = build_cycle(source, args.p)
        report = verify_cycle(cycle)
        verdict = "PASS" if report.passed(VERIFY_TOLERANCE) else "FAIL"
        print(f"{source.value}  p={report.dimension}  P={report.cycle_length}  {verdict}")
        print(f"  sum d d^T - P I      {report.p1_residual:.3e}")
        print(f"  sum d                {report.p2_residual:.3e}")
        print(f"  X X^T - P I          {report.orthogonality_residual:.3e}")
        print(f"  max ||d||            {report.max_col_norm:.6f}")
        print(f"  max ||d d^T - I||    {report.max_outer_norm:.6f}")
        if verdict == "FAIL":
            logger.warning("%s cycle fails verification at p=%d", source.value, args.p)
            status = EXIT_VALIDATION
        if args.dump is not None:
            FileCycleRepository(CsvStore(args.dump)).save(cycle.columns)
            logger.info("Wrote %d directions to %s", cycle.cycle_length, args.dump)
    return status


def _run(args: argparse.Namespace) -> int:
    algorithm: Algorithm = args.alg
    plan = ExperimentPlan(
        algorithms=(algorithm,),
        objective=args.objective,
        sigma=args.sigma or 0.0,
        budget=args.budget if args.budget is not None else DEFAULT_RUN_BUDGET,
        replications=1,
        base_seed=args.seed,
        dimension=args.p,
        force=args.force,
        **_schedule_fields(args),
    )
    report = run_single(plan, algorithm, record_trajectory=args.trajectory is not None)
    outcome = report.outcome
    rows = [
        ("algorithm", algorithm.value),
        ("objective", plan.objective.value),
        ("iterations", str(outcome.iterations)),
        ("simulations", str(outcome.simulations_used)),
        ("diverged", "true" if outcome.diverged else "false"),
        ("loss", f"{report.loss:.6e}"),
        ("nmse", f"{report.nmse:.3e}"),
    ]
    for name, value in rows:
        print(f"{name:<12}{value}")

    if outcome.trajectory is not None:
        FileTrajectoryRepository(CsvStore(args.trajectory)).save(outcome.trajectory, report.theta_star)
    if outcome.diverged:
        logger.warning("Run diverged after %d iterations", outcome.iterations)
        return EXIT_DIVERGED
    return EXIT_OK


def _bench(args: argparse.Namespace) -> int:
    overrides: dict[str, Any] = {
        "replications": args.reps,
        "base_seed": args.seed,
        "dimension": args.p,
        "force": args.force,
        "budget": args.budget,
        "algorithms": args.alg,
        **_schedule_fields(args),
    }
    if args.table is not None:
        plans = table_plans(args.table, overrides)
    else:
        if args.alg is None or args.budget is None:
            logger.error("bench needs --table, or --alg and --budget")
            return EXIT_USAGE
        fields = {k: v for k, v in overrides.items() if v is not None}
        plans = [ExperimentPlan(**fields, objective=args.objective, sigma=args.sigma or 0.0)]

    workers = args.workers if args.workers is not None else get_settings().MAX_WORKERS
    records = []
    for plan in plans:
        result = run_experiment(plan, workers=workers)
        print(summarize(result).text)
        print()
        records.extend(result.records)

    if args.csv is not None:
        FileRecordRepository(CsvStore(args.csv)).save_all(records)
        logger.info("Wrote %d records to %s", len(records), args.csv)

    diverged = sum(1 for r in records if r.diverged)
    if 2 * diverged > len(records):
        logger.warning("%d of %d replications diverged", diverged, len(records))
        return EXIT_DIVERGED
    return EXIT_OK
