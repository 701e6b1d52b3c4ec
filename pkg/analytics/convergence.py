"""Grid refinement study on the point-target problem, whose solution is ``|x|``."""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd

from core.hjsd_loader import parse_hjsd
from core.models import SolverConfig
from core.solver import ValueField, solve
from core.stratification import StratifiedDomain, build_domain
from data.problems import eikonal_problem

LOGGER = logging.getLogger(__name__)

DEFAULT_NODES: tuple[int, ...] = (51, 101, 201)


def eikonal_error(domain: StratifiedDomain, field: ValueField) -> float:
    """Sup-norm distance between the solution and the Euclidean norm."""

    exact = np.linalg.norm(domain.grid.node_coordinates(), axis=1)
    return float(np.max(np.abs(field.values - exact)))


def convergence_study(
    nodes: Sequence[int] = DEFAULT_NODES,
    *,
    controls: Sequence[int] = (3, 64),
    tau: float = 1e-6,
    threads: int = 1,
) -> pd.DataFrame:
    """Solve on each grid with ``h = sqrt(dx)`` and tabulate the error."""

    rows: list[dict[str, float]] = []
    for count in nodes:
        domain = build_domain(parse_hjsd(eikonal_problem(nodes=count, controls=controls)))
        h = math.sqrt(domain.grid.dx)
        field = solve(domain, SolverConfig(h=h, tau=tau, threads=threads))
        error = eikonal_error(domain, field)
        LOGGER.info("eikonal %d nodes, h=%.4f: error %.4e (%d sweeps)", count, h, error, field.iterations)
        rows.append(
            {
                "nodes": count,
                "h": h,
                "dx": domain.grid.dx,
                "error": error,
                "iterations": field.iterations,
                "converged": field.converged,
            }
        )
    table = pd.DataFrame(rows)
    table["ratio"] = table["error"] / table["error"].shift(1)
    return table


__all__ = ["eikonal_error", "convergence_study", "DEFAULT_NODES"]
