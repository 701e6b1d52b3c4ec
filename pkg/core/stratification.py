"""Discrete stratified domain: geometry projection, flood fill and labels.

Building a domain runs four stages, each of which is also exposed on its own:

1. :func:`project_geometry` snaps points, lines and planes onto the grid.
2. :func:`flood_fill_regions` grows the full-dimensional regions from their
   seeds without crossing lower-dimensional nodes.
3. :func:`build_labels` assembles, for every node, the ordered list of
   components whose closure contains it.
4. :func:`validate_afs` checks the admissibility conditions at grid
   resolution and reports closure violations as warnings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Final, Iterable, Mapping, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .controls import ControlSet, control_sets
from .errors import ExpressionSyntaxError, ProblemFileError, StratificationError
from .expr import ExpressionTree, bind, evaluate_many, parse_expression
from .grid import INDEX_TOLERANCE, BoxGrid, SimplexFrame
from .models import ComponentId, Diagnostic, Directive, ProblemFile

LOGGER = logging.getLogger(__name__)

# Fixed axes and tangent axes of every point/line/plane tag. The numbers of a
# directive list the fixed coordinates first, then one (start, end) pair per
# tangent axis.
_LAYOUT: Final[Mapping[Tuple[int, str], Tuple[Tuple[int, ...], Tuple[int, ...]]]] = {
    (2, "#P"): ((0, 1), ()),
    (2, "#LX"): ((0,), (1,)),
    (2, "#LY"): ((1,), (0,)),
    (3, "#P"): ((0, 1, 2), ()),
    (3, "#LXY"): ((0, 1), (2,)),
    (3, "#LYZ"): ((1, 2), (0,)),
    (3, "#LXZ"): ((0, 2), (1,)),
    (3, "#SX"): ((0,), (1, 2)),
    (3, "#SY"): ((1,), (0, 2)),
    (3, "#SZ"): ((2,), (0, 1)),
}
REGION_TAGS: Final[frozenset[str]] = frozenset({"#S", "#V"})


@dataclass(frozen=True, eq=False)
class ProjectedGeometry:
    """A point, line or plane after snapping to the grid."""

    directive: Directive
    k: int
    frame: SimplexFrame
    nodes: np.ndarray  # open node set
    closure: np.ndarray


@dataclass(frozen=True, eq=False)
class ComponentProblem:
    """One connected component M^{k,j} with its control problem.

    ``speed_values`` and ``cost_values`` are the speed and running cost sampled
    at the ``closure`` nodes, in the same order.
    """

    cid: ComponentId
    tag: str
    line: int
    frame: SimplexFrame
    nodes: np.ndarray
    closure: np.ndarray
    speed: ExpressionTree | None
    cost: ExpressionTree
    discount: float
    speed_values: np.ndarray
    cost_values: np.ndarray

    @property
    def k(self) -> int:
        return self.cid.k

    @property
    def tangent_axes(self) -> Tuple[int, ...]:
        return self.frame.axes

    @property
    def name(self) -> str:
        return f"{self.tag}@{self.line}"


@dataclass(frozen=True, eq=False)
class StratifiedDomain:
    """The whole discrete problem, shared read-only by the solver.

    Labels are stored CSR style: the component indices of node ``n`` are
    ``label_idx[label_ptr[n]:label_ptr[n + 1]]``, ascending, and components are
    kept sorted by ``(k, j)`` so index order is ``(k, j)`` order.
    """

    grid: BoxGrid
    components: Tuple[ComponentProblem, ...]
    label_ptr: np.ndarray
    label_idx: np.ndarray
    controls: Tuple[ControlSet, ...]
    bound: float
    c_min: float
    c_max: float
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def label_indices(self, node: int) -> np.ndarray:
        return self.label_idx[self.label_ptr[node] : self.label_ptr[node + 1]]

    def labels(self, node: int) -> Tuple[ComponentId, ...]:
        return tuple(self.components[i].cid for i in self.label_indices(node))

    def index_of(self, cid: ComponentId) -> int:
        for index, component in enumerate(self.components):
            if component.cid == cid:
                return index
        raise KeyError(f"no component {cid}")

    def control_set(self, component: ComponentProblem) -> ControlSet:
        return self.controls[component.k]

    def point_components(self) -> Tuple[ComponentProblem, ...]:
        return tuple(c for c in self.components if c.k == 0)

    def node_of(self, point: Sequence[float]) -> int:
        """Nearest node to ``point``."""

        return int(self.grid.flat_index(_snap_point(self.grid, point)))


def _snap(t: float) -> int:
    """Round half away from zero."""

    return int(math.copysign(math.floor(abs(t) + 0.5), t))


def _snap_point(grid: BoxGrid, point: Sequence[float]) -> Tuple[int, ...]:
    t = grid.index_coordinates(np.asarray(point, dtype=float).reshape(1, -1))[0]
    return tuple(_snap(value) for value in t)


def _in_range(index: int, count: int) -> bool:
    return 0 <= index < count


def _lattice(grid: BoxGrid, anchor: Sequence[int], axes: Sequence[int], ranges: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Flat indices of the nodes with tangent indices in the inclusive ``ranges``."""

    if not axes:
        return np.array([grid.flat_index(anchor)], dtype=np.intp)
    spans = [np.arange(lo, hi + 1) for lo, hi in ranges]
    mesh = np.meshgrid(*spans, indexing="ij")
    multi = np.broadcast_to(np.asarray(anchor, dtype=np.intp), mesh[0].shape + (grid.dimension,)).copy()
    for axis, values in zip(axes, mesh):
        multi[..., axis] = values
    return np.sort(grid.flat_index(multi.reshape(-1, grid.dimension)))


def _project_one(grid: BoxGrid, directive: Directive) -> ProjectedGeometry:
    fixed_axes, tangent_axes = _LAYOUT[(grid.dimension, directive.tag)]
    numbers = directive.numbers
    spacing = grid.spacing

    anchor = [0] * grid.dimension
    for position, axis in enumerate(fixed_axes):
        t = (numbers[position] - grid.lower[axis]) / spacing[axis]
        index = _snap(t)
        if not _in_range(index, grid.counts[axis]):
            raise StratificationError(
                f"{directive.tag} coordinate {'xyz'[axis]}={numbers[position]} lies outside the box",
                line=directive.line,
            )
        anchor[axis] = index

    open_ranges: list[Tuple[int, int]] = []
    closed_ranges: list[Tuple[int, int]] = []
    for position, axis in enumerate(tangent_axes):
        start, end = sorted(numbers[len(fixed_axes) + 2 * position : len(fixed_axes) + 2 * position + 2])
        t_start = (start - grid.lower[axis]) / spacing[axis]
        t_end = (end - grid.lower[axis]) / spacing[axis]
        last = grid.counts[axis] - 1
        if t_start < -INDEX_TOLERANCE:
            lo, lo_open = 0, 0
        else:
            lo = _snap(t_start)
            lo_open = lo + 1
        if t_end > last + INDEX_TOLERANCE:
            hi, hi_open = last, last
        else:
            hi = _snap(t_end)
            hi_open = hi - 1
        if lo > last or hi < 0:
            raise StratificationError(
                f"{directive.tag} extent along {'xyz'[axis]} lies outside the box", line=directive.line
            )
        if hi <= lo:
            raise StratificationError(
                f"{directive.tag} extent along {'xyz'[axis]} is degenerate after projection "
                f"({start} and {end} snap to the same node)",
                line=directive.line,
            )
        if hi_open < lo_open:
            raise StratificationError(
                f"{directive.tag} has no interior nodes along {'xyz'[axis]} after projection",
                line=directive.line,
            )
        open_ranges.append((lo_open, hi_open))
        closed_ranges.append((lo, hi))

    frame = SimplexFrame(
        axes=tuple(tangent_axes),
        anchor=tuple(anchor),
        lo=tuple(lo for lo, _ in closed_ranges),
        hi=tuple(hi for _, hi in closed_ranges),
    )
    return ProjectedGeometry(
        directive=directive,
        k=len(tangent_axes),
        frame=frame,
        nodes=_lattice(grid, anchor, tangent_axes, open_ranges),
        closure=_lattice(grid, anchor, tangent_axes, closed_ranges),
    )


def project_geometry(grid: BoxGrid, declarations: Iterable[Directive]) -> list[ProjectedGeometry]:
    """Snap every point, line and plane directive onto the grid.

    Region seeds (``#S``/``#V``) are skipped; they are handled by
    :func:`flood_fill_regions`.
    """

    projected = [
        _project_one(grid, directive) for directive in declarations if directive.tag not in REGION_TAGS
    ]
    LOGGER.info("Projected %d lower-dimensional components onto the grid", len(projected))
    return projected


def _face_structure(dimension: int) -> np.ndarray:
    return ndimage.generate_binary_structure(dimension, 1)


def flood_fill_regions(
    grid: BoxGrid,
    lower_strata_nodes: np.ndarray,
    seeds: Sequence[Sequence[float]],
    *,
    lines: Sequence[int] | None = None,
) -> list[np.ndarray]:
    """Grow one region per seed over face-adjacent nodes not on lower strata.

    ``lower_strata_nodes`` is either a boolean mask over all nodes or an array
    of flat node indices. Returns the sorted flat indices of each region.
    """

    lines = list(lines) if lines is not None else [None] * len(seeds)
    lower = np.zeros(grid.n_nodes, dtype=bool)
    given = np.asarray(lower_strata_nodes)
    if given.dtype == bool:
        lower |= given
    else:
        lower[given.astype(np.intp)] = True

    free = grid.shape_field(~lower)
    labelled, count = ndimage.label(free, structure=_face_structure(grid.dimension))
    flat_labels = labelled.ravel(order="F")

    owner: dict[int, int | None] = {}
    regions: list[np.ndarray] = []
    for seed, line in zip(seeds, lines):
        multi = _snap_point(grid, seed)
        if not all(_in_range(i, n) for i, n in zip(multi, grid.counts)):
            raise StratificationError(f"region seed {tuple(seed)} lies outside the box", line=line)
        node = int(grid.flat_index(multi))
        if lower[node]:
            raise StratificationError(
                f"region seed {tuple(seed)} lies on a lower-dimensional component", line=line, node=multi
            )
        region_id = int(flat_labels[node])
        if region_id in owner:
            previous = owner[region_id]
            raise StratificationError(
                f"region seed {tuple(seed)} falls in the same region as the seed on line {previous}",
                line=line,
            )
        owner[region_id] = line
        regions.append(np.flatnonzero(flat_labels == region_id))

    covered = np.isin(flat_labels, list(owner)) | lower
    if not covered.all():
        node = int(np.flatnonzero(~covered)[0])
        multi = tuple(int(i) for i in grid.multi_index(node))
        raise StratificationError(
            f"node at {tuple(np.round(grid.coordinates(node), 12))} belongs to no component; "
            "add a region seed for it",
            node=multi,
        )
    LOGGER.info("Flood fill produced %d region(s) out of %d connected pieces", len(regions), count)
    return regions


def region_closure(grid: BoxGrid, region: np.ndarray, lower_mask: np.ndarray) -> np.ndarray:
    """Region nodes plus the lower-stratum nodes face-adjacent to one of them."""

    mask = np.zeros(grid.n_nodes, dtype=bool)
    mask[region] = True
    grown = ndimage.binary_dilation(grid.shape_field(mask), structure=_face_structure(grid.dimension))
    grown_flat = grown.ravel(order="F")
    return np.flatnonzero(mask | (grown_flat & lower_mask))


def build_labels(grid: BoxGrid, components: Sequence[ComponentProblem]) -> Tuple[np.ndarray, np.ndarray]:
    """CSR label map: component indices whose closure contains each node."""

    nodes = np.concatenate([component.closure for component in components])
    owners = np.concatenate(
        [np.full(component.closure.size, index, dtype=np.intp) for index, component in enumerate(components)]
    )
    order = np.lexsort((owners, nodes))
    counts = np.bincount(nodes, minlength=grid.n_nodes)
    ptr = np.concatenate(([0], np.cumsum(counts))).astype(np.intp)
    if (counts == 0).any():
        node = int(np.flatnonzero(counts == 0)[0])
        raise StratificationError("node has an empty label set", node=grid.multi_index(node))
    return ptr, owners[order]


def _check_disjoint(grid: BoxGrid, items: Sequence[Tuple[int, np.ndarray, str]]) -> None:
    """Hard error when two components of one dimension share an open node."""

    by_dimension: dict[int, list[Tuple[np.ndarray, str]]] = {}
    for k, nodes, label in items:
        by_dimension.setdefault(k, []).append((nodes, label))
    for k, entries in by_dimension.items():
        seen = np.full(grid.n_nodes, -1, dtype=np.intp)
        for position, (nodes, label) in enumerate(entries):
            clash = seen[nodes] >= 0
            if clash.any():
                node = int(nodes[clash][0])
                other = entries[int(seen[node])][1]
                raise StratificationError(
                    f"{label} overlaps {other}: components of dimension {k} must be disjoint",
                    node=grid.multi_index(node),
                )
            seen[nodes] = position


def validate_afs(domain: StratifiedDomain) -> list[Diagnostic]:
    """Check the admissible-flat-stratification conditions on the grid.

    Overlapping components of equal dimension raise; a closure node of a
    k-dimensional component that is not on any lower-dimensional component is
    reported as a warning (declaring end-points is left to the user).
    """

    grid = domain.grid
    _check_disjoint(grid, [(c.k, c.nodes, c.name) for c in domain.components])

    lowest = np.full(grid.n_nodes, grid.dimension + 1, dtype=np.intp)
    for component in domain.components:
        lowest[component.nodes] = np.minimum(lowest[component.nodes], component.k)

    diagnostics: list[Diagnostic] = []
    for component in domain.components:
        if component.k in (0, grid.dimension):
            continue
        boundary = np.setdiff1d(component.closure, component.nodes, assume_unique=True)
        missing = boundary[lowest[boundary] >= component.k]
        if missing.size:
            first = tuple(np.round(grid.coordinates(int(missing[0])), 12))
            kind = "end-point" if component.k == 1 else "boundary node"
            diagnostics.append(
                Diagnostic(
                    severity="warning",
                    message=(
                        f"{kind} {first} of {component.name} is not on a lower-dimensional component "
                        f"({missing.size} node(s) in total)"
                    ),
                    line=component.line,
                )
            )
    for diagnostic in diagnostics:
        LOGGER.warning("line %s: %s", diagnostic.line, diagnostic.message)
    return diagnostics


def _bind_expression(text: str, dimension: int, directive: Directive, field: str) -> ExpressionTree:
    try:
        return bind(parse_expression(text), dimension)
    except ExpressionSyntaxError as exc:
        raise ProblemFileError(f"{field} expression: {exc}", line=directive.line) from exc


def _make_component(
    grid: BoxGrid,
    cid: ComponentId,
    directive: Directive,
    frame: SimplexFrame,
    nodes: np.ndarray,
    closure: np.ndarray,
) -> ComponentProblem:
    cost = _bind_expression(directive.cost, grid.dimension, directive, "cost")
    speed = None
    if directive.speed is not None:
        speed = _bind_expression(directive.speed, grid.dimension, directive, "speed")
    elif not cost.is_constant:
        raise ProblemFileError("point costs must be constants", line=directive.line)

    points = grid.coordinates(closure)
    cost_values = evaluate_many(cost, points)
    speed_values = np.zeros(closure.size) if speed is None else evaluate_many(speed, points)
    return ComponentProblem(
        cid=cid,
        tag=directive.tag,
        line=directive.line,
        frame=frame,
        nodes=nodes,
        closure=closure,
        speed=speed,
        cost=cost,
        discount=float(directive.discount),
        speed_values=speed_values,
        cost_values=cost_values,
    )


def build_domain(
    problem: ProblemFile,
    *,
    controls: Tuple[ControlSet, ...] | None = None,
) -> StratifiedDomain:
    """Run projection, flood fill, labelling and validation for ``problem``."""

    header = problem.header
    grid = BoxGrid(counts=header.counts, lower=header.lower, upper=header.upper)
    projected = project_geometry(grid, problem.directives)

    _check_disjoint(grid, [(p.k, p.nodes, f"{p.directive.tag}@{p.directive.line}") for p in projected])

    # Lower-dimensional components win shared nodes.
    occupied = np.zeros(grid.n_nodes, dtype=bool)
    open_sets: list[np.ndarray] = [np.empty(0, dtype=np.intp)] * len(projected)
    for k in range(grid.dimension):
        claimed = np.zeros(grid.n_nodes, dtype=bool)
        for position, item in enumerate(projected):
            if item.k != k:
                continue
            keep = item.nodes[~occupied[item.nodes]]
            if keep.size < item.nodes.size:
                LOGGER.info(
                    "%s@%d: %d node(s) already on lower-dimensional components",
                    item.directive.tag,
                    item.directive.line,
                    item.nodes.size - keep.size,
                )
            if keep.size == 0:
                raise StratificationError(
                    f"{item.directive.tag} has no nodes left after lower-dimensional components",
                    line=item.directive.line,
                )
            open_sets[position] = keep
            claimed[keep] = True
        occupied |= claimed

    seeds = [d for d in problem.directives if d.tag in REGION_TAGS]
    regions = flood_fill_regions(
        grid,
        occupied,
        [d.numbers for d in seeds],
        lines=[d.line for d in seeds],
    )

    components: list[ComponentProblem] = []
    next_j: dict[int, int] = {}
    for position, item in enumerate(projected):
        j = next_j.get(item.k, 0)
        next_j[item.k] = j + 1
        components.append(
            _make_component(grid, ComponentId(item.k, j), item.directive, item.frame, open_sets[position], item.closure)
        )
    full = grid.full_frame()
    for j, (directive, region) in enumerate(zip(seeds, regions)):
        closure = region_closure(grid, region, occupied)
        components.append(_make_component(grid, ComponentId(grid.dimension, j), directive, full, region, closure))
    components.sort(key=lambda component: component.cid)

    ptr, idx = build_labels(grid, components)
    LOGGER.info("Built label map: %d nodes, %d labels", grid.n_nodes, idx.size)

    bound = max(
        max(float(np.max(np.abs(c.cost_values))), float(np.max(np.abs(c.speed_values))))
        for c in components
    )
    discounts = [c.discount for c in components]
    domain = StratifiedDomain(
        grid=grid,
        components=tuple(components),
        label_ptr=ptr,
        label_idx=idx,
        controls=controls if controls is not None else control_sets(header.control_sizes),
        bound=bound,
        c_min=min(discounts),
        c_max=max(discounts),
    )
    diagnostics = tuple(validate_afs(domain))
    return StratifiedDomain(
        grid=domain.grid,
        components=domain.components,
        label_ptr=domain.label_ptr,
        label_idx=domain.label_idx,
        controls=domain.controls,
        bound=domain.bound,
        c_min=domain.c_min,
        c_max=domain.c_max,
        diagnostics=diagnostics,
    )


__all__ = [
    "ProjectedGeometry",
    "ComponentProblem",
    "StratifiedDomain",
    "REGION_TAGS",
    "project_geometry",
    "flood_fill_regions",
    "region_closure",
    "build_labels",
    "validate_afs",
    "build_domain",
]
