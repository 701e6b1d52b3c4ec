"""Command-line front end: ``python hjsd.py --input problem.hjsd --h 0.1``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn, Sequence, Tuple

from config import DEFAULT_TAU, load_settings
from .errors import HJSDError
from .hjsd_loader import load_problem
from .models import SolverConfig
from .pipeline import run, summary_table

LOGGER = logging.getLogger(__name__)

EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_point(text: str) -> Tuple[float, ...]:
    """``"x,y"`` or ``"x,y,z"`` as a tuple of floats."""

    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if len(values) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected 2 or 3 coordinates, got {len(values)}")
    return values


def build_parser() -> argparse.ArgumentParser:
    settings = load_settings()
    parser = _Parser(
        prog="hjsd",
        description="Solve an HJB problem on a flat stratified domain and write the result as VTK.",
    )
    parser.add_argument("--input", required=True, type=Path, help="problem file (.hjsd)")
    parser.add_argument("--h", required=True, type=float, help="time step of the scheme")
    parser.add_argument("--tau", type=float, default=DEFAULT_TAU, help="sup-norm convergence tolerance")
    parser.add_argument(
        "--max-iters",
        type=int,
        default=None,
        help="sweep budget (default 10*(Nx+Ny+Nz)*ceil(1/h))",
    )
    parser.add_argument("--threads", type=int, default=settings.threads, help="worker threads")
    parser.add_argument("--penalty", type=float, default=None, help="penalty for controls leaving a component")
    parser.add_argument(
        "--trace",
        action="append",
        default=[],
        type=parse_point,
        metavar="X,Y[,Z]",
        help="start of an optimal trajectory; repeatable",
    )
    parser.add_argument("--trace-dt", type=float, default=None, help="Euler step of the traces (default: grid spacing)")
    parser.add_argument(
        "--trace-steps",
        type=int,
        default=None,
        help="step budget per trace (default round(10/dx))",
    )
    parser.add_argument("--output", type=Path, default=None, help="VTK file (default: input stem + .vtk)")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default INFO)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    settings = load_settings()
    output = args.output or args.input.with_suffix(".vtk")
    try:
        problem = load_problem(args.input)
        for start in args.trace:
            if len(start) != problem.dimension:
                raise HJSDError(f"--trace {start} needs {problem.dimension} coordinates")
        config = SolverConfig(
            h=args.h,
            tau=args.tau,
            max_iterations=args.max_iters,
            threads=args.threads,
            penalty=args.penalty,
            stencil_cache_mb=settings.stencil_cache_mb,
        )
        summary = run(problem, config, output, args.trace, dt=args.trace_dt, max_steps=args.trace_steps)
    except HJSDError as exc:
        LOGGER.error("%s", exc)
        return exc.exit_code

    print(summary_table(summary).to_string(header=False))
    return summary.exit_code


__all__ = ["main", "build_parser", "parse_point"]
