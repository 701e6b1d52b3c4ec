"""Structured box grid, Kuhn simplicial decomposition and P1 interpolation.

Nodes are numbered x-fastest: ``flat = i + N_x * (j + N_y * k)``.

Every cell is split into ``d!`` simplices by the Kuhn (Freudenthal) rule: the
simplex containing a point is picked by sorting its local cell coordinates in
decreasing order, and its vertices walk from the cell's low corner to the high
corner one axis at a time in that order. In 2D this is the split along the
(low,low)-(high,high) diagonal; in 3D it gives six tetrahedra that all share
the main diagonal. Ties keep the x < y < z axis order (lowest simplex index),
and a point on a face between two cells belongs to the lower cell.

Interpolation on a lower-dimensional component runs the same rule inside a
:class:`SimplexFrame`: the component's tangent axes, the fixed indices of the
remaining axes and the index extents of the component's closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final, Protocol, Sequence, Tuple

import numpy as np

from .errors import OutOfDomainError

# Slack, in units of grid spacing, when deciding whether a point is inside.
INDEX_TOLERANCE: Final[float] = 1e-9


@dataclass(frozen=True)
class BoxGrid:
    """Uniform node lattice on ``[lower, upper]`` with ``counts`` nodes per axis."""

    counts: Tuple[int, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self) -> None:
        dims = len(self.counts)
        if dims not in (2, 3) or len(self.lower) != dims or len(self.upper) != dims:
            raise ValueError("BoxGrid needs 2 or 3 axes with matching bounds")
        for axis in range(dims):
            if self.counts[axis] < 2:
                raise ValueError(f"axis {axis} needs at least 2 nodes, got {self.counts[axis]}")
            if not self.lower[axis] < self.upper[axis]:
                raise ValueError(f"axis {axis} needs lower < upper, got {self.lower[axis]} >= {self.upper[axis]}")

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(
            (hi - lo) / (n - 1) for lo, hi, n in zip(self.lower, self.upper, self.counts)
        )

    @property
    def dx(self) -> float:
        """Largest spacing, the Δx of the convergence statements."""

        return max(self.spacing)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.counts))

    @property
    def strides(self) -> np.ndarray:
        return np.concatenate(([1], np.cumprod(self.counts[:-1]))).astype(np.intp)

    def flat_index(self, multi: Sequence[int] | np.ndarray) -> np.ndarray | int:
        """Flat node number(s) from multi-indices (last axis = grid axis)."""

        idx = np.asarray(multi, dtype=np.intp)
        flat = idx @ self.strides
        return int(flat) if np.ndim(flat) == 0 else flat

    def multi_index(self, flat: int | np.ndarray) -> np.ndarray:
        """Multi-indices for flat node number(s); shape ``(..., dimension)``."""

        unravelled = np.unravel_index(np.asarray(flat, dtype=np.intp), self.counts, order="F")
        return np.stack(unravelled, axis=-1)

    def coordinates(self, flat: int | np.ndarray) -> np.ndarray:
        """Coordinates of node(s), computed as ``lower + index * spacing``."""

        multi = self.multi_index(flat)
        return np.asarray(self.lower) + multi * np.asarray(self.spacing)

    def node_coordinates(self) -> np.ndarray:
        """Coordinates of all nodes in flat order, shape ``(n_nodes, dimension)``."""

        return self.coordinates(np.arange(self.n_nodes))

    def axis_coordinates(self) -> Tuple[np.ndarray, ...]:
        return tuple(
            lo + np.arange(n) * step
            for lo, n, step in zip(self.lower, self.counts, self.spacing)
        )

    def index_coordinates(self, points: np.ndarray) -> np.ndarray:
        """Points expressed in fractional node-index units."""

        pts = np.atleast_2d(np.asarray(points, dtype=float))[:, : self.dimension]
        return (pts - np.asarray(self.lower)) / np.asarray(self.spacing)

    def contains(self, points: np.ndarray) -> np.ndarray:
        t = self.index_coordinates(points)
        upper = np.asarray(self.counts) - 1
        return np.all((t >= -INDEX_TOLERANCE) & (t <= upper + INDEX_TOLERANCE), axis=1)

    def full_frame(self) -> "SimplexFrame":
        return SimplexFrame(
            axes=tuple(range(self.dimension)),
            anchor=(0,) * self.dimension,
            lo=(0,) * self.dimension,
            hi=tuple(n - 1 for n in self.counts),
        )

    def shape_field(self, values: np.ndarray) -> np.ndarray:
        """View a flat per-node array as an array indexed ``[i, j(, k)]``."""

        return np.asarray(values).reshape(self.counts, order="F")


@dataclass(frozen=True)
class SimplexFrame:
    """Sub-lattice on which a component interpolates.

    ``axes`` are the tangent axes, ``anchor`` the full multi-index whose
    entries on non-tangent axes fix the component's position, ``lo``/``hi``
    the closure's index extents along each tangent axis.
    """

    axes: Tuple[int, ...]
    anchor: Tuple[int, ...]
    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.axes)


class HasFrame(Protocol):
    frame: SimplexFrame


@dataclass(frozen=True)
class InterpolationStencil:
    """Nodes with non-zero barycentric weight around a point."""

    nodes: Tuple[int, ...]
    weights: Tuple[float, ...]


def simplex_stencils(
    grid: BoxGrid,
    points: np.ndarray,
    frame: SimplexFrame | None = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised barycentric stencils.

    Returns ``(nodes, weights, inside)`` with ``nodes`` and ``weights`` of shape
    ``(n, m + 1)`` for an ``m``-dimensional frame. Rows where ``inside`` is
    False lie outside the frame's closure; their stencils are those of the
    clamped point and must not be used.
    """

    frame = frame or grid.full_frame()
    t_all = grid.index_coordinates(points)
    n = t_all.shape[0]
    anchor = np.asarray(frame.anchor, dtype=float)

    fixed_axes = [axis for axis in range(grid.dimension) if axis not in frame.axes]
    inside = np.ones(n, dtype=bool)
    if fixed_axes:
        off = np.abs(t_all[:, fixed_axes] - anchor[fixed_axes])
        inside &= np.all(off <= INDEX_TOLERANCE, axis=1)

    base = np.broadcast_to(np.asarray(frame.anchor, dtype=np.intp), (n, grid.dimension)).copy()
    m = frame.dimension
    if m == 0:
        nodes = (base @ grid.strides).reshape(n, 1)
        return nodes, np.ones((n, 1)), inside

    axes = list(frame.axes)
    lo = np.asarray(frame.lo, dtype=float)
    hi = np.asarray(frame.hi, dtype=float)
    t = t_all[:, axes]
    inside &= np.all((t >= lo - INDEX_TOLERANCE) & (t <= hi + INDEX_TOLERANCE), axis=1)
    t = np.clip(t, lo, hi)

    cell = np.clip(np.ceil(t) - 1.0, lo, hi - 1.0)
    local = np.clip(t - cell, 0.0, 1.0)
    order = np.argsort(-local, axis=1, kind="stable")
    ranked = np.take_along_axis(local, order, axis=1)

    weights = np.empty((n, m + 1))
    weights[:, 0] = 1.0 - ranked[:, 0]
    for i in range(1, m):
        weights[:, i] = ranked[:, i - 1] - ranked[:, i]
    weights[:, m] = ranked[:, m - 1]

    vertex = base
    vertex[:, axes] = cell.astype(np.intp)
    nodes = np.empty((n, m + 1), dtype=np.intp)
    nodes[:, 0] = vertex @ grid.strides
    axis_lookup = np.asarray(axes, dtype=np.intp)
    strides = grid.strides
    for i in range(1, m + 1):
        step_axis = axis_lookup[order[:, i - 1]]
        nodes[:, i] = nodes[:, i - 1] + strides[step_axis]
    return nodes, weights, inside


def interpolate_many(
    grid: BoxGrid,
    field: np.ndarray,
    points: np.ndarray,
    frame: SimplexFrame | None = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Interpolated values at ``points`` and the inside mask."""

    nodes, weights, inside = simplex_stencils(grid, points, frame)
    values = np.asarray(field, dtype=float)
    result = weights[:, 0] * values[nodes[:, 0]]
    for column in range(1, nodes.shape[1]):
        result = result + weights[:, column] * values[nodes[:, column]]
    return result, inside


def _single_stencil(grid: BoxGrid, point: Sequence[float], frame: SimplexFrame | None, what: str) -> InterpolationStencil:
    nodes, weights, inside = simplex_stencils(grid, np.asarray(point, dtype=float).reshape(1, -1), frame)
    if not inside[0]:
        raise OutOfDomainError(f"point outside the {what}", point=point)
    keep = weights[0] > 0.0
    return InterpolationStencil(
        nodes=tuple(int(node) for node in nodes[0][keep]),
        weights=tuple(float(weight) for weight in weights[0][keep]),
    )


def locate(grid: BoxGrid, point: Sequence[float]) -> InterpolationStencil:
    """Barycentric stencil of ``point`` in the simplex that contains it."""

    return _single_stencil(grid, point, None, "box")


def interpolate(grid: BoxGrid, field: np.ndarray, point: Sequence[float]) -> float:
    stencil = locate(grid, point)
    values = np.asarray(field, dtype=float)
    return float(sum(w * values[node] for node, w in zip(stencil.nodes, stencil.weights)))


def restricted_stencil(grid: BoxGrid, point: Sequence[float], component: HasFrame) -> InterpolationStencil:
    """Stencil that only uses nodes of ``component``'s closure."""

    return _single_stencil(grid, point, component.frame, "component closure")


def restricted_interpolate(
    grid: BoxGrid,
    field: np.ndarray,
    point: Sequence[float],
    component: HasFrame,
) -> float:
    stencil = restricted_stencil(grid, point, component)
    values = np.asarray(field, dtype=float)
    return float(sum(w * values[node] for node, w in zip(stencil.nodes, stencil.weights)))


__all__ = [
    "BoxGrid",
    "SimplexFrame",
    "InterpolationStencil",
    "INDEX_TOLERANCE",
    "simplex_stencils",
    "interpolate_many",
    "locate",
    "interpolate",
    "restricted_stencil",
    "restricted_interpolate",
]
