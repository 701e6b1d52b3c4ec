"""Semi-Lagrangian scheme on a stratified domain and its Jacobi fixed point.

A candidate for node ``x``, component ``(k, j)`` and control ``a`` is::

    (1 - c h) * u(foot) + h * l(x),    foot = x + h * b(x) * a

where ``u(foot)`` is interpolated on the component's closure only. Feet that
leave the closure get the penalty value ``P``. The node update takes the
minimum over every component labelling the node and every control, scanning
components in ``(k, j)`` order and controls by index; the first minimum wins.

:class:`SchemeOperator` is the vectorised update used by :func:`iterate` and
:func:`solve`. :func:`candidate_value` and :func:`update_node` are the scalar
forms of the same formulas.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Final, Iterator, Mapping, Sequence, Tuple

import numpy as np

from config import PENALTY_CAP, PENALTY_FACTOR
from .errors import ConfigError, OutOfDomainError
from .grid import restricted_stencil, simplex_stencils
from .models import ComponentId, SolverConfig
from .stratification import ComponentProblem, StratifiedDomain

LOGGER = logging.getLogger(__name__)

# Stencil entries (rows * controls * vertices) handled per chunk when the
# tables are not cached.
CHUNK_ENTRIES: Final[int] = 1 << 20
_BYTES_PER_ENTRY: Final[int] = 16  # one intp node + one float64 weight


@dataclass(frozen=True, eq=False)
class ValueField:
    """Result of a solve.

    ``component`` holds, per node, the index into ``domain.components`` of the
    minimising component and ``control`` the control index inside its set.
    ``penalized`` marks nodes where every candidate left its closure.
    """

    values: np.ndarray
    component: np.ndarray
    control: np.ndarray
    iterations: int
    residual: float
    converged: bool
    residuals: Tuple[float, ...] = ()
    penalized: np.ndarray | None = None

    def argmin(self, domain: StratifiedDomain, node: int) -> Tuple[ComponentId, int]:
        return domain.components[int(self.component[node])].cid, int(self.control[node])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class Sweep:
    """One Jacobi iterate as produced by :func:`iterate`."""

    iteration: int
    values: np.ndarray
    residual: float
    component: np.ndarray
    control: np.ndarray
    admissible: np.ndarray


def default_max_iterations(domain: StratifiedDomain, h: float) -> int:
    return 10 * sum(domain.grid.counts) * math.ceil(1.0 / h)


def default_penalty(domain: StratifiedDomain) -> float:
    return min(max(PENALTY_FACTOR * domain.bound / domain.c_min, 1.0), PENALTY_CAP)


def resolve_config(domain: StratifiedDomain, config: SolverConfig) -> SolverConfig:
    """Fill the domain-dependent defaults of ``config`` and validate it."""

    h = float(config.h)
    if not h > 0.0:
        raise ConfigError(f"time step h must be positive, got {h}")
    if not h * domain.c_max < 1.0:
        raise ConfigError(
            f"h * c_max must be below 1 (h={h}, c_max={domain.c_max:g}); reduce h below {1.0 / domain.c_max:g}"
        )
    if not config.tau > 0.0:
        raise ConfigError(f"tolerance tau must be positive, got {config.tau}")
    if config.threads < 1:
        raise ConfigError(f"threads must be at least 1, got {config.threads}")
    if config.stencil_cache_mb < 0:
        raise ConfigError(f"stencil cache budget cannot be negative, got {config.stencil_cache_mb}")

    max_iterations = config.max_iterations
    if max_iterations is None:
        max_iterations = default_max_iterations(domain, h)
    elif max_iterations < 1:
        raise ConfigError(f"max_iterations must be at least 1, got {max_iterations}")

    penalty = default_penalty(domain) if config.penalty is None else float(config.penalty)
    floor = domain.bound / domain.c_min
    if not penalty > floor:
        raise ConfigError(f"penalty {penalty:g} must exceed M/c_min = {floor:g}")

    return replace(config, h=h, max_iterations=int(max_iterations), penalty=penalty)


class _ComponentBlock:
    """Per-component data of the scheme: closure rows times controls."""

    def __init__(self, index: int, domain: StratifiedDomain, component: ComponentProblem, h: float) -> None:
        grid = domain.grid
        self.index = index
        self.component = component
        self.rows = component.closure
        self.coefficient = 1.0 - component.discount * h
        self.running = h * component.cost_values
        self.directions = domain.control_set(component).embed(component.tangent_axes, grid.dimension)
        self.n_controls = self.directions.shape[0]
        self.width = component.k + 1
        self._grid = grid
        self._points = grid.coordinates(self.rows)
        self._steps = h * component.speed_values
        self._cached: Tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @property
    def size(self) -> int:
        return int(self.rows.size)

    @property
    def table_bytes(self) -> int:
        return self.size * self.n_controls * (self.width * _BYTES_PER_ENTRY + 1)

    def compute(self, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stencils of rows ``start:stop``, shaped ``(rows, controls, width)``."""

        points = self._points[start:stop]
        feet = points[:, None, :] + self._steps[start:stop, None, None] * self.directions[None, :, :]
        count = stop - start
        nodes, weights, inside = simplex_stencils(
            self._grid, feet.reshape(-1, self._grid.dimension), self.component.frame
        )
        return (
            nodes.reshape(count, self.n_controls, self.width),
            weights.reshape(count, self.n_controls, self.width),
            inside.reshape(count, self.n_controls),
        )

    def cache(self) -> None:
        self._cached = self.compute(0, self.size)

    @property
    def cached(self) -> bool:
        return self._cached is not None

    def stencils(self, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._cached is None:
            return self.compute(start, stop)
        nodes, weights, inside = self._cached
        return nodes[start:stop], weights[start:stop], inside[start:stop]

    def candidates(self, values: np.ndarray, start: int, stop: int, penalty: float) -> Tuple[np.ndarray, np.ndarray]:
        nodes, weights, inside = self.stencils(start, stop)
        total = weights[..., 0] * values[nodes[..., 0]]
        for column in range(1, self.width):
            total = total + weights[..., column] * values[nodes[..., column]]
        candidate = self.coefficient * total + self.running[start:stop, None]
        return np.where(inside, candidate, penalty), inside


class SchemeOperator:
    """The update operator ``u -> I(u)`` with stencils precomputed where possible.

    Stencil tables are cached per component while they fit in
    ``config.stencil_cache_mb``; the rest are rebuilt chunk by chunk on every
    application. Chunks run on a thread pool; results do not depend on the
    number of threads.
    """

    def __init__(self, domain: StratifiedDomain, config: SolverConfig) -> None:
        self.domain = domain
        self.config = resolve_config(domain, config)
        self.penalty = float(self.config.penalty)
        self.blocks = [
            _ComponentBlock(index, domain, component, self.config.h)
            for index, component in enumerate(domain.components)
        ]
        budget = self.config.stencil_cache_mb * 2**20
        for block in self.blocks:
            if block.table_bytes <= budget:
                block.cache()
                budget -= block.table_bytes
        cached = sum(block.cached for block in self.blocks)
        LOGGER.info(
            "Scheme operator ready: %d components, %d with cached stencils, penalty %.3g",
            len(self.blocks),
            cached,
            self.penalty,
        )
        self.chunk_bounds = [self._chunk_bounds(block) for block in self.blocks]
        self._pool = ThreadPoolExecutor(max_workers=self.config.threads) if self.config.threads > 1 else None

    def _chunk_bounds(self, block: _ComponentBlock) -> list[Tuple[int, int]]:
        per_row = max(block.n_controls * block.width, 1)
        rows = max(CHUNK_ENTRIES // per_row, 1)
        if self.config.threads > 1:
            rows = min(rows, max(math.ceil(block.size / self.config.threads), 1))
        return [(start, min(start + rows, block.size)) for start in range(0, block.size, rows)]

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self) -> "SchemeOperator":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _reduce(self, block: _ComponentBlock, values: np.ndarray, start: int, stop: int):
        candidates, inside = block.candidates(values, start, stop, self.penalty)
        best = np.argmin(candidates, axis=1)
        return candidates[np.arange(stop - start), best], best, inside.any(axis=1)

    def apply(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """One update of every node from ``values``.

        Returns ``(new_values, component, control, admissible)`` where
        ``admissible`` is False at nodes whose candidates were all penalised.
        """

        n = self.domain.grid.n_nodes
        u = np.asarray(values, dtype=float)
        result = np.full(n, np.inf)
        component = np.full(n, -1, dtype=np.intp)
        control = np.zeros(n, dtype=np.intp)
        admissible = np.zeros(n, dtype=bool)

        tasks = [(block, start, stop) for block, bounds in zip(self.blocks, self.chunk_bounds) for start, stop in bounds]
        if self._pool is None:
            outputs = [self._reduce(block, u, start, stop) for block, start, stop in tasks]
        else:
            outputs = list(self._pool.map(lambda task: self._reduce(task[0], u, task[1], task[2]), tasks))

        for (block, start, stop), (best_value, best_control, any_inside) in zip(tasks, outputs):
            rows = block.rows[start:stop]
            better = best_value < result[rows]
            target = rows[better]
            result[target] = best_value[better]
            component[target] = block.index
            control[target] = best_control[better]
            admissible[rows] |= any_inside
        return result, component, control, admissible


def candidate_value(
    domain: StratifiedDomain,
    values: np.ndarray,
    node: int,
    component: ComponentId | ComponentProblem,
    control: int,
    config: SolverConfig,
) -> float:
    """Scalar candidate for one (node, component, control) triple."""

    if config.penalty is None:
        config = resolve_config(domain, config)
    if isinstance(component, ComponentId):
        component = domain.components[domain.index_of(component)]
    grid = domain.grid
    position = int(np.searchsorted(component.closure, node))
    if position >= component.closure.size or component.closure[position] != node:
        raise ValueError(f"node {node} is not in the closure of {component.name}")

    direction = domain.control_set(component).embed(component.tangent_axes, grid.dimension)[control]
    foot = grid.coordinates(node) + config.h * component.speed_values[position] * direction
    try:
        stencil = restricted_stencil(grid, foot, component)
    except OutOfDomainError:
        return float(config.penalty)
    u = np.asarray(values, dtype=float)
    interpolated = sum(weight * u[index] for index, weight in zip(stencil.nodes, stencil.weights))
    return float((1.0 - component.discount * config.h) * interpolated + config.h * component.cost_values[position])


def update_node(
    domain: StratifiedDomain,
    values: np.ndarray,
    node: int,
    config: SolverConfig,
) -> Tuple[float, Tuple[ComponentId, int]]:
    """Minimum candidate at ``node`` and the first (component, control) reaching it."""

    if config.penalty is None:
        config = resolve_config(domain, config)
    best = math.inf
    record: Tuple[ComponentId, int] | None = None
    for index in domain.label_indices(node):
        component = domain.components[int(index)]
        for control in range(len(domain.control_set(component))):
            value = candidate_value(domain, values, node, component, control, config)
            if value < best:
                best, record = value, (component.cid, control)
    assert record is not None
    return best, record


def iterate(
    domain: StratifiedDomain,
    config: SolverConfig,
    initial: np.ndarray | None = None,
    *,
    operator: SchemeOperator | None = None,
) -> Iterator[Sweep]:
    """Yield the Jacobi iterates ``u^1, u^2, ...`` up to ``max_iterations``.

    Every sweep reads only the previous iterate, so the order in which nodes
    are processed does not matter.
    """

    own = operator is None
    scheme = operator or SchemeOperator(domain, config)
    u = np.zeros(domain.grid.n_nodes) if initial is None else np.array(initial, dtype=float)
    try:
        for iteration in range(1, int(scheme.config.max_iterations) + 1):
            new, component, control, admissible = scheme.apply(u)
            residual = float(np.max(np.abs(new - u)))
            LOGGER.debug("sweep %d: residual %.3e", iteration, residual)
            yield Sweep(iteration, new, residual, component, control, admissible)
            u = new
    finally:
        if own:
            scheme.close()


def solve(
    domain: StratifiedDomain,
    config: SolverConfig,
    initial: np.ndarray | None = None,
) -> ValueField:
    """Iterate until the sup-norm residual drops to ``tau`` or the budget runs out."""

    resolved = resolve_config(domain, config)
    started = time.perf_counter()
    LOGGER.info(
        "Solving on %s nodes with h=%g, tau=%g, max %d sweeps, %d thread(s)",
        "x".join(str(n) for n in domain.grid.counts),
        resolved.h,
        resolved.tau,
        resolved.max_iterations,
        resolved.threads,
    )
    residuals: list[float] = []
    last: Sweep | None = None
    with SchemeOperator(domain, resolved) as scheme:
        for sweep in iterate(domain, resolved, initial, operator=scheme):
            residuals.append(sweep.residual)
            last = sweep
            if sweep.residual <= resolved.tau:
                break
    assert last is not None

    converged = last.residual <= resolved.tau
    penalized = ~last.admissible
    elapsed = time.perf_counter() - started
    if converged:
        LOGGER.info("Converged after %d sweeps (residual %.3e, %.2fs)", last.iteration, last.residual, elapsed)
    else:
        LOGGER.warning(
            "No convergence after %d sweeps: residual %.3e > tau %.3e", last.iteration, last.residual, resolved.tau
        )
    if penalized.any():
        LOGGER.warning("%d node(s) have every candidate penalized", int(penalized.sum()))
    return ValueField(
        values=last.values,
        component=last.component,
        control=last.control,
        iterations=last.iteration,
        residual=last.residual,
        converged=converged,
        residuals=tuple(residuals),
        penalized=penalized,
    )


def hamiltonian_value(
    domain: StratifiedDomain,
    node: int | Sequence[float],
    r: float,
    p: Sequence[float],
    *,
    admissible: Mapping[int, np.ndarray] | None = None,
) -> float:
    """``max over labels, controls of -b a . p + c r - l`` at a node.

    ``node`` is a flat index or coordinates, which are snapped to the nearest
    node. ``admissible`` optionally restricts the controls of a component
    (keyed by component index) to a boolean mask.
    """

    if not isinstance(node, (int, np.integer)):
        node = domain.node_of(node)
    node = int(node)
    gradient = np.zeros(domain.dimension)
    given = np.asarray(p, dtype=float)
    gradient[: given.size] = given[: domain.dimension]

    best = -math.inf
    for index in domain.label_indices(node):
        component = domain.components[int(index)]
        position = int(np.searchsorted(component.closure, node))
        directions = domain.control_set(component).embed(component.tangent_axes, domain.dimension)
        terms = (
            -component.speed_values[position] * (directions @ gradient)
            + component.discount * r
            - component.cost_values[position]
        )
        if admissible is not None and int(index) in admissible:
            terms = terms[np.asarray(admissible[int(index)], dtype=bool)]
        if terms.size:
            best = max(best, float(np.max(terms)))
    return best


__all__ = [
    "ValueField",
    "Sweep",
    "SchemeOperator",
    "resolve_config",
    "default_max_iterations",
    "default_penalty",
    "candidate_value",
    "update_node",
    "iterate",
    "solve",
    "hamiltonian_value",
    "CHUNK_ENTRIES",
]
