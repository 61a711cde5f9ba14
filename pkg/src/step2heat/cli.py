"""Command-line interface for step2heat.

Every sub-command writes CSV with a header row; floats carry 17 significant
digits so that output round-trips exactly. Diagnostics go to standard error.

Exit codes: 0 success, 2 invalid group spec, 3 numerical failure (including a
failed verification check), 4 usage error.
"""

import argparse
import csv
import logging
import sys
import time
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from typing import NoReturn, TextIO

import numpy as np

from step2heat.config import McConfig, QuadratureConfig, RunConfig
from step2heat.errors import (
    ConvergenceError,
    NotHeisenbergTypeError,
    PoleError,
    SpecParseError,
    SpecValidationError,
    SpectralError,
)
from step2heat.group.law import inverse, multiply
from step2heat.group.spec import check_point, is_heisenberg_type, load_group_spec
from step2heat.kernel.carnot import CarnotHeatKernel, Triple, make_kernel
from step2heat.kernel.green import green_eval
from step2heat.kernel.heisenberg import HeisenbergTypeKernel
from step2heat.logging import get_logger, setup_logging
from step2heat.models import FractionalParams, GroupPoint, GroupSpec
from step2heat.pipeline import GridPipeline
from step2heat.protocols import HeatKernel
from step2heat.special.fractional import closed_form_E_s, fractional_green
from step2heat.verification.checks import SUITES, Suite, run_suites

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID_SPEC = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 4


class UsageParser(argparse.ArgumentParser):
    """Argument parser that exits with the usage code instead of argparse's 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _parse_point(text: str, spec: GroupSpec) -> GroupPoint:
    try:
        values = [float(item) for item in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse point {text!r}: {exc}") from exc
    if len(values) != spec.dimension:
        raise ValueError(
            f"point {text!r} has {len(values)} coordinates, {spec.name!r} needs {spec.dimension}"
        )
    point = GroupPoint.from_flat(values, spec.m)
    check_point(spec, point)
    return point


def _parse_times(text: str) -> list[float]:
    try:
        times = [float(item) for item in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse times {text!r}: {exc}") from exc
    for t in times:
        if t <= 0:
            raise ValueError(f"Time must be positive, got {t}")
    return times


def _coordinate_names(spec: GroupSpec) -> list[str]:
    return [f"z{i + 1}" for i in range(spec.m)] + [f"s{i + 1}" for i in range(spec.k)]


@contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        yield stream


def _base(args: argparse.Namespace, spec: GroupSpec) -> GroupPoint:
    if args.base is None:
        return GroupPoint.identity(spec.m, spec.k)
    return _parse_point(args.base, spec)


def cmd_validate(run: RunConfig, _args: argparse.Namespace) -> int:
    spec = load_group_spec(str(run.spec_path))
    with _output(run.output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["name", "m", "k", "Q_hom", "heisenberg_type"])
        writer.writerow(
            [spec.name, spec.m, spec.k, spec.Q_hom, str(is_heisenberg_type(spec)).lower()]
        )
    return EXIT_OK


def cmd_eval(run: RunConfig, args: argparse.Namespace) -> int:
    spec = load_group_spec(str(run.spec_path))
    cfg = QuadratureConfig(rel_tol=run.tolerance)
    heat: HeatKernel = CarnotHeatKernel(spec, cfg) if args.general else make_kernel(spec, cfg)
    value = heat.evaluate(_parse_point(args.point, spec), _base(args, spec), args.t)
    with _output(run.output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["value", "est_error", "imag_residue"])
        writer.writerow([_fmt(value.value), _fmt(value.est_error), _fmt(value.imag_residue)])
    return EXIT_OK


def _grid_triples(
    source: TextIO, spec: GroupSpec, base: GroupPoint, times: Sequence[float]
) -> Iterator[Triple]:
    for line in source:
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        point = _parse_point(text, spec)
        for t in times:
            yield point, base, t


def cmd_grid(run: RunConfig, args: argparse.Namespace) -> int:
    """Stream kernel values for every point of ``--points`` and every time of ``--t``."""
    spec = load_group_spec(str(run.spec_path))
    cfg = QuadratureConfig(rel_tol=run.tolerance)
    base = _base(args, spec)
    times = _parse_times(args.t)
    pipeline = GridPipeline(kernel_factory=lambda: make_kernel(spec, cfg))
    source: TextIO = sys.stdin
    if args.points != "-":
        source = open(args.points, encoding="utf-8")  # noqa: SIM115
    try:
        with _output(run.output) as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow([*_coordinate_names(spec), "t", "value", "est_error", "imag_residue"])
            for (point, _, t), value in pipeline.run(_grid_triples(source, spec, base, times)):
                writer.writerow(
                    [_fmt(x) for x in point.flat]
                    + [_fmt(t), _fmt(value.value), _fmt(value.est_error), _fmt(value.imag_residue)]
                )
    finally:
        if source is not sys.stdin:
            source.close()
    return EXIT_OK


def cmd_green(run: RunConfig, args: argparse.Namespace) -> int:
    spec = load_group_spec(str(run.spec_path))
    cfg = QuadratureConfig(rel_tol=run.tolerance)
    point = _parse_point(args.point, spec)
    pole = _base(args, spec)
    relative = multiply(spec, inverse(spec, pole), point)
    columns: list[str] = []
    values: list[float] = []
    if args.mode in ("numeric", "both"):
        if args.s == 1.0:
            numeric = green_eval(spec, point, pole, cfg)
        else:
            params = FractionalParams(s=args.s, y=0.0, spec=spec)
            numeric = fractional_green(params, relative.z, relative.sigma, cfg)
        columns.append("numeric")
        values.append(numeric)
    if args.mode in ("closed-form", "both"):
        params = FractionalParams(s=args.s, y=0.0, spec=spec)
        columns.append("closed_form")
        values.append(closed_form_E_s(params, relative.z, relative.sigma))
    if args.mode == "both":
        columns.append("ratio")
        values.append(values[0] / values[1])
    with _output(run.output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        writer.writerow([_fmt(value) for value in values])
    return EXIT_OK


def cmd_verify(run: RunConfig, args: argparse.Namespace) -> int:
    """Run verification suites; a failed check exits with the numerical failure code."""
    spec = load_group_spec(str(run.spec_path))
    cfg = QuadratureConfig(rel_tol=run.tolerance)
    suites: tuple[Suite, ...] = SUITES if args.suite == "all" else (args.suite,)
    mc = McConfig(n_paths=args.paths, n_steps=args.steps, seed=run.seed)
    rows = run_suites(spec, suites, cfg, run.seed, mc)
    with _output(run.output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["check", "value", "target", "tolerance", "pass"])
        for row in rows:
            writer.writerow(
                [row.check, _fmt(row.value), _fmt(row.target), _fmt(row.tolerance), row.status]
            )
    failed = [row.check for row in rows if row.passed is False]
    if failed:
        logger.error("Failed checks: %s", ", ".join(failed))
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_bench(run: RunConfig, args: argparse.Namespace) -> int:
    """Evaluations per second of the Heisenberg-type path against the general path."""
    spec = load_group_spec(str(run.spec_path))
    cfg = QuadratureConfig(rel_tol=run.tolerance)
    rng = np.random.default_rng(run.seed)
    identity = GroupPoint.identity(spec.m, spec.k)
    points = [
        GroupPoint(rng.uniform(-1.0, 1.0, spec.m), rng.uniform(-1.0, 1.0, spec.k))
        for _ in range(args.count)
    ]
    kernels: list[tuple[str, HeatKernel]] = []
    if is_heisenberg_type(spec):
        kernels.append(("heisenberg-type", HeisenbergTypeKernel(spec, cfg)))
    kernels.append(("general", CarnotHeatKernel(spec, cfg)))
    with _output(run.output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["path", "evaluations", "seconds", "evaluations_per_second"])
        for name, heat in kernels:
            start = time.perf_counter()
            for point in points:
                heat.evaluate(point, identity, args.t)
            elapsed = time.perf_counter() - start
            writer.writerow([name, args.count, _fmt(elapsed), _fmt(args.count / elapsed)])
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "grid": cmd_grid,
    "green": cmd_green,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def _positive(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def build_parser() -> UsageParser:
    common = UsageParser(add_help=False)
    common.add_argument("--spec", help="Group spec file or builtin:<name>")
    common.add_argument("--tol", type=float, default=1e-8, help="Relative tolerance (1e-8)")
    common.add_argument("--seed", type=int, default=0, help="Seed for random samples (0)")
    common.add_argument("--out", help="Output file (default: standard output)")
    common.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")

    parser = UsageParser(
        prog="step2heat",
        description="Heat kernels, Green functions and their verification on step-two groups",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common], help="Check a group spec")
    validate.add_argument("file", nargs="?", help="Group spec file or builtin:<name>")

    evaluate = commands.add_parser("eval", parents=[common], help="Evaluate p(g, g', t)")
    evaluate.add_argument("--point", required=True, help="z1,...,zm,s1,...,sk")
    evaluate.add_argument("--base", help="Pole g' (default: identity)")
    evaluate.add_argument("--t", type=_positive, required=True, help="Time")
    evaluate.add_argument(
        "--general", action="store_true", help="Use the general spectral path for every group"
    )

    grid = commands.add_parser("grid", parents=[common], help="Stream kernel values on a grid")
    grid.add_argument("--points", default="-", help="File with one point per line (- for stdin)")
    grid.add_argument("--base", help="Pole g' (default: identity)")
    grid.add_argument("--t", required=True, help="Comma-separated times")

    green = commands.add_parser("green", parents=[common], help="Green function / ℰ_s")
    green.add_argument("--point", required=True, help="z1,...,zm,s1,...,sk")
    green.add_argument("--base", help="Pole (default: identity)")
    green.add_argument("--s", type=float, default=1.0, help="Fractional order in (0, 1] (1)")
    mode = green.add_mutually_exclusive_group()
    mode.add_argument("--closed-form", dest="mode", action="store_const", const="closed-form")
    mode.add_argument("--numeric", dest="mode", action="store_const", const="numeric")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    green.set_defaults(mode="numeric")

    verify = commands.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    verify.add_argument("--paths", type=int, default=10_000, help="Monte Carlo paths (10000)")
    verify.add_argument("--steps", type=int, default=200, help="Monte Carlo steps (200)")

    bench = commands.add_parser("bench", parents=[common], help="Compare kernel paths")
    bench.add_argument("--count", type=int, default=100, help="Evaluations per path (100)")
    bench.add_argument("--t", type=_positive, default=1.0, help="Time (1)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line tool and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level=logging.DEBUG if args.verbose else logging.WARNING)
    spec_path = args.spec
    if args.command == "validate" and args.file is not None:
        spec_path = args.file
    if spec_path is None:
        parser.error(f"{args.command} needs a group spec (--spec)")
    try:
        run = RunConfig(
            command=args.command,
            spec_path=spec_path,
            tolerance=args.tol,
            seed=args.seed,
            output=args.out,
        )
        return COMMANDS[run.command](run, args)
    except (SpecParseError, SpecValidationError) as exc:
        print(f"step2heat: invalid group spec: {exc}", file=sys.stderr)
        return EXIT_INVALID_SPEC
    except (ConvergenceError, SpectralError) as exc:
        print(f"step2heat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NotHeisenbergTypeError, PoleError, ValueError, OSError) as exc:
        print(f"step2heat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
