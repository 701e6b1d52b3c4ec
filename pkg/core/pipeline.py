"""End-to-end run: problem file in, VTK files and a summary out."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from .models import ProblemFile, RunSummary, SolverConfig, Trace
from .solver import ValueField, resolve_config, solve
from .stratification import StratifiedDomain, build_domain
from .trajectory import DynamicsField, check_trace_settings, extract_dynamics, trace_many
from .vtk_writer import traces_path, write_vtk

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 3


@dataclass(frozen=True, eq=False)
class Solution:
    """Everything computed for one problem, before anything is written."""

    domain: StratifiedDomain
    config: SolverConfig
    field: ValueField
    dynamics: DynamicsField
    traces: Tuple[Trace, ...]
    wall_time: float


def point_values(domain: StratifiedDomain, field: ValueField) -> dict[str, float]:
    """Value at every declared point, keyed ``#P@<line> (x, y[, z])``."""

    values: dict[str, float] = {}
    for component in domain.point_components():
        node = int(component.nodes[0])
        coords = ", ".join(f"{c:g}" for c in domain.grid.coordinates(node))
        values[f"{component.name} ({coords})"] = float(field.values[node])
    return values


def solve_problem(
    problem: ProblemFile,
    config: SolverConfig,
    traces: Sequence[Sequence[float]] = (),
    *,
    dt: float | None = None,
    max_steps: int | None = None,
) -> Solution:
    """Build the domain, solve, and trace; raises on hard errors."""

    check_trace_settings(dt, max_steps)
    started = time.perf_counter()
    domain = build_domain(problem)
    resolved = resolve_config(domain, config)
    field = solve(domain, resolved)
    dynamics = extract_dynamics(domain, field, allow_unconverged=True)
    paths = trace_many(domain, dynamics, traces, dt, max_steps, threads=resolved.threads)
    return Solution(
        domain=domain,
        config=resolved,
        field=field,
        dynamics=dynamics,
        traces=paths,
        wall_time=time.perf_counter() - started,
    )


def run(
    problem: ProblemFile,
    config: SolverConfig,
    output: str | Path,
    traces: Sequence[Sequence[float]] = (),
    *,
    dt: float | None = None,
    max_steps: int | None = None,
) -> RunSummary:
    """Solve ``problem`` and write the results next to ``output``.

    A field that did not converge is still written; the summary then carries
    exit code 3.
    """

    solution = solve_problem(problem, config, traces, dt=dt, max_steps=max_steps)
    target = write_vtk(
        solution.domain,
        solution.field,
        solution.dynamics,
        output,
        solution.traces,
        title=f"HJSD value function {Path(problem.source).name if problem.source else ''}".rstrip(),
    )
    field = solution.field
    return RunSummary(
        exit_code=EXIT_OK if field.converged else EXIT_NOT_CONVERGED,
        iterations=field.iterations,
        residual=field.residual,
        converged=field.converged,
        wall_time=solution.wall_time,
        output=target,
        trajectory_output=traces_path(target) if solution.traces else None,
        diagnostics=solution.domain.diagnostics,
        point_values=point_values(solution.domain, field),
        residuals=field.residuals,
    )


def summary_table(summary: RunSummary) -> pd.DataFrame:
    """Two-column table of the run summary for printing."""

    rows: list[tuple[str, object]] = [
        ("converged", summary.converged),
        ("iterations", summary.iterations),
        ("residual", f"{summary.residual:.3e}"),
        ("wall time [s]", f"{summary.wall_time:.2f}"),
        ("output", str(summary.output) if summary.output else "-"),
    ]
    if summary.trajectory_output is not None:
        rows.append(("trajectories", str(summary.trajectory_output)))
    rows.append(("warnings", sum(d.severity == "warning" for d in summary.diagnostics)))
    for name, value in summary.point_values.items():
        rows.append((f"u at {name}", f"{value:.6g}"))
    return pd.DataFrame(rows, columns=["item", "value"]).set_index("item")


__all__ = ["Solution", "solve_problem", "run", "point_values", "summary_table", "EXIT_OK", "EXIT_NOT_CONVERGED"]
