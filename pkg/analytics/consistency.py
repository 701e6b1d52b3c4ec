"""Consistency of the scheme against the Hamiltonian on smooth test functions.

For a smooth ``phi`` with known gradient the residual at node ``x`` is
``|H(x, phi(x), Dphi(x)) - S(x)|`` where ``S`` is the scheme written in
Hamiltonian form::

    S(x) = max over labels and controls of (phi(x) - (1 - c h) phi_hat(foot)) / h - l(x)

``phi_hat`` is the piecewise-linear interpolant of the nodal samples of
``phi``. Both maxima run over the same non-penalised controls.
"""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from core.expr import ExpressionTree, evaluate_many
from core.hjsd_loader import parse_hjsd
from core.models import SolverConfig
from core.solver import SchemeOperator
from core.stratification import StratifiedDomain, build_domain
from data.problems import constant_problem

LOGGER = logging.getLogger(__name__)

DEFAULT_STEPS: tuple[float, ...] = (0.2, 0.1, 0.05)


def consistency_residual(
    domain: StratifiedDomain,
    config: SolverConfig,
    phi: ExpressionTree,
    gradient: Sequence[ExpressionTree],
) -> float:
    """Largest gap between the Hamiltonian and the scheme over all nodes."""

    if len(gradient) != domain.dimension:
        raise ValueError(f"gradient needs {domain.dimension} expressions, got {len(gradient)}")
    grid = domain.grid
    points = grid.node_coordinates()
    samples = evaluate_many(phi, points)
    slopes = np.column_stack([evaluate_many(tree, points) for tree in gradient])

    n = grid.n_nodes
    hamiltonian = np.full(n, -np.inf)
    scheme = np.full(n, -np.inf)
    with SchemeOperator(domain, config) as operator:
        h = operator.config.h
        for block, bounds in zip(operator.blocks, operator.chunk_bounds):
            component = block.component
            for start, stop in bounds:
                rows = block.rows[start:stop]
                nodes, weights, inside = block.stencils(start, stop)
                interpolated = weights[..., 0] * samples[nodes[..., 0]]
                for column in range(1, block.width):
                    interpolated = interpolated + weights[..., column] * samples[nodes[..., column]]

                r = samples[rows][:, None]
                cost = component.cost_values[start:stop, None]
                drift = component.speed_values[start:stop, None] * (slopes[rows] @ block.directions.T)
                h_terms = np.where(inside, -drift + component.discount * r - cost, -np.inf)
                s_terms = np.where(inside, (r - block.coefficient * interpolated) / h - cost, -np.inf)
                hamiltonian[rows] = np.maximum(hamiltonian[rows], h_terms.max(axis=1))
                scheme[rows] = np.maximum(scheme[rows], s_terms.max(axis=1))

    usable = np.isfinite(hamiltonian) & np.isfinite(scheme)
    if not usable.any():
        raise ValueError("no node has an admissible control")
    return float(np.max(np.abs(hamiltonian[usable] - scheme[usable])))


def nodes_for_spacing(dx: float, extent: float = 2.0) -> int:
    return int(round(extent / dx)) + 1


def consistency_study(
    phi: ExpressionTree,
    gradient: Sequence[ExpressionTree],
    steps: Sequence[float] = DEFAULT_STEPS,
    *,
    problem_for: Callable[[int], str] | None = None,
    dx_exponent: float = 2.0,
) -> pd.DataFrame:
    """Residual on a refinement sequence with ``dx = h ** dx_exponent``.

    ``problem_for(nodes)`` returns the problem text on a ``nodes``-per-axis
    grid; the default is a single unit-speed region with 16 directions.
    """

    build = problem_for or (lambda nodes: constant_problem(nodes=nodes, controls=(3, 16)))
    rows: list[dict[str, float]] = []
    for h in steps:
        nodes = nodes_for_spacing(h**dx_exponent)
        domain = build_domain(parse_hjsd(build(nodes)))
        residual = consistency_residual(domain, SolverConfig(h=h, stencil_cache_mb=0), phi, gradient)
        LOGGER.info("consistency h=%g dx=%g: residual %.4e", h, domain.grid.dx, residual)
        rows.append({"h": h, "dx": domain.grid.dx, "nodes": nodes, "residual": residual})
    table = pd.DataFrame(rows)
    table["ratio"] = table["residual"] / table["residual"].shift(1)
    return table


__all__ = ["consistency_residual", "consistency_study", "nodes_for_spacing", "DEFAULT_STEPS"]
