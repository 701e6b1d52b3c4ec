"""Optimal dynamics from a solved value field and explicit-Euler trajectories."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Final, Sequence, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from config import STATIONARY_SPEED
from .errors import ConfigError, OutOfDomainError
from .grid import INDEX_TOLERANCE, BoxGrid
from .models import Trace
from .solver import ValueField
from .stratification import StratifiedDomain

LOGGER = logging.getLogger(__name__)

STEP_BUDGET_FACTOR: Final[float] = 10.0


@dataclass(frozen=True, eq=False)
class DynamicsField:
    """Optimal velocity ``b(x) a*`` at every node, shape ``(n_nodes, dimension)``.

    Nodes whose optimal component is a point carry the zero vector.
    """

    grid: BoxGrid
    vectors: np.ndarray

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        stacked = np.stack(
            [self.grid.shape_field(self.vectors[:, axis]) for axis in range(self.grid.dimension)], axis=-1
        )
        return RegularGridInterpolator(self.grid.axis_coordinates(), stacked, method="linear")

    def at(self, points: np.ndarray) -> np.ndarray:
        """Multilinear interpolation of the nodal vectors at points inside the box."""

        pts = np.atleast_2d(np.asarray(points, dtype=float))
        clipped = np.clip(pts, self.grid.lower, self.grid.upper)
        return self._interpolator(clipped)

    @property
    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)


def extract_dynamics(
    domain: StratifiedDomain,
    field: ValueField,
    *,
    allow_unconverged: bool = False,
) -> DynamicsField:
    """Velocity of the stored minimiser at every node."""

    if not field.converged and not allow_unconverged:
        raise ValueError("optimal dynamics need a converged value field")
    grid = domain.grid
    vectors = np.zeros((grid.n_nodes, grid.dimension))
    for index, component in enumerate(domain.components):
        if component.k == 0:
            continue
        nodes = np.flatnonzero(field.component == index)
        if nodes.size == 0:
            continue
        positions = np.searchsorted(component.closure, nodes)
        directions = domain.control_set(component).embed(component.tangent_axes, grid.dimension)
        vectors[nodes] = component.speed_values[positions, None] * directions[field.control[nodes]]
    return DynamicsField(grid=grid, vectors=vectors)


def default_max_steps(grid: BoxGrid) -> int:
    """``10/Δx`` Euler steps, enough to cross the box several times at unit speed."""

    return max(1, int(round(STEP_BUDGET_FACTOR / grid.dx)))


def check_trace_settings(dt: float | None, max_steps: int | None) -> None:
    """Raise :class:`ConfigError` for a non-positive step or step budget."""

    if dt is not None and not float(dt) > 0.0:
        raise ConfigError(f"trace step dt must be positive, got {dt}")
    if max_steps is not None and int(max_steps) < 1:
        raise ConfigError(f"trace step budget must be at least 1, got {max_steps}")


def trace(
    domain: StratifiedDomain,
    dynamics: DynamicsField,
    start: Sequence[float],
    dt: float | None = None,
    max_steps: int | None = None,
) -> Trace:
    """Follow ``X' = V(X)`` from ``start`` with explicit Euler steps.

    Stops after ``max_steps`` steps, when the interpolated speed falls below
    the stationary threshold, or before a step that would leave the box.
    ``dt`` defaults to the grid spacing and ``max_steps`` to
    :func:`default_max_steps`.
    """

    grid = domain.grid
    point = np.asarray(start, dtype=float)
    if point.shape != (grid.dimension,):
        raise ValueError(f"trace start needs {grid.dimension} coordinates, got {len(point)}")
    if not grid.contains(point.reshape(1, -1))[0]:
        raise OutOfDomainError("trace start outside the box", point=point)
    check_trace_settings(dt, max_steps)
    step = grid.dx if dt is None else float(dt)
    budget = default_max_steps(grid) if max_steps is None else int(max_steps)

    lower = np.asarray(grid.lower) - INDEX_TOLERANCE * np.asarray(grid.spacing)
    upper = np.asarray(grid.upper) + INDEX_TOLERANCE * np.asarray(grid.spacing)
    points = [tuple(float(v) for v in point)]
    reason = "max_steps"
    for _ in range(budget):
        velocity = dynamics.at(point)[0]
        if np.linalg.norm(velocity) < STATIONARY_SPEED:
            reason = "stationary"
            break
        candidate = point + step * velocity
        if np.any(candidate < lower) or np.any(candidate > upper):
            reason = "left_box"
            break
        point = candidate
        points.append(tuple(float(v) for v in point))
    LOGGER.debug("Trace from %s: %d points, stopped on %s", tuple(start), len(points), reason)
    return Trace(start=tuple(float(v) for v in start), points=tuple(points), reason=reason)


def trace_many(
    domain: StratifiedDomain,
    dynamics: DynamicsField,
    starts: Sequence[Sequence[float]],
    dt: float | None = None,
    max_steps: int | None = None,
    *,
    threads: int = 1,
) -> Tuple[Trace, ...]:
    """Trace several starts, in input order."""

    if threads <= 1 or len(starts) <= 1:
        return tuple(trace(domain, dynamics, start, dt, max_steps) for start in starts)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return tuple(pool.map(lambda start: trace(domain, dynamics, start, dt, max_steps), starts))


__all__ = [
    "DynamicsField",
    "extract_dynamics",
    "check_trace_settings",
    "trace",
    "trace_many",
    "default_max_steps",
]
