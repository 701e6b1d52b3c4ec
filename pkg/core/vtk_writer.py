"""Legacy ASCII VTK output for value fields and traced trajectories.

The value file is a ``STRUCTURED_GRID`` whose points are listed x-fastest,
with these ``POINT_DATA`` arrays in order:

* ``value`` (double): the value function;
* ``stratum_dim`` (int): dimension of the minimising component;
* ``optimal_dynamics`` (double vectors, z = 0 in 2D);
* ``stratum`` (int): dimension of the lowest component owning the node;
* ``running_cost`` (double): running cost of that component at the node.

Trajectories go to a separate ``POLYDATA`` file with one line cell per trace.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Final, Sequence, TextIO

import numpy as np

from .errors import OutputError
from .models import Trace
from .solver import ValueField
from .stratification import StratifiedDomain
from .trajectory import DynamicsField

LOGGER = logging.getLogger(__name__)

VTK_HEADER: Final[str] = "# vtk DataFile Version 3.0"
FLOAT_FORMAT: Final[str] = "%.17g"
TRACE_SUFFIX: Final[str] = ".traj.vtk"


def _pad3(points: np.ndarray) -> np.ndarray:
    padded = np.zeros((points.shape[0], 3))
    padded[:, : points.shape[1]] = points
    return padded


def _write_scalars(handle: TextIO, name: str, kind: str, values: np.ndarray, fmt: str) -> None:
    handle.write(f"SCALARS {name} {kind} 1\nLOOKUP_TABLE default\n")
    np.savetxt(handle, values.reshape(-1, 1), fmt=fmt)


def owning_strata(domain: StratifiedDomain, sampled: str = "cost_values") -> tuple[np.ndarray, np.ndarray]:
    """Per node: dimension of the lowest component whose open set holds it, and its data there.

    ``sampled`` names the closure array read from that component,
    ``"cost_values"`` or ``"speed_values"``.
    """

    if sampled not in ("cost_values", "speed_values"):
        raise ValueError(f"sampled must be 'cost_values' or 'speed_values', got {sampled!r}")
    n = domain.grid.n_nodes
    stratum = np.full(n, -1, dtype=np.intp)
    data = np.zeros(n)
    for component in sorted(domain.components, key=lambda c: c.cid):
        free = component.nodes[stratum[component.nodes] < 0]
        if free.size == 0:
            continue
        stratum[free] = component.k
        data[free] = getattr(component, sampled)[np.searchsorted(component.closure, free)]
    return stratum, data


def traces_path(path: str | Path) -> Path:
    """``out.vtk`` -> ``out.traj.vtk``."""

    target = Path(path)
    return target.with_name(target.stem + TRACE_SUFFIX)


def write_vtk(
    domain: StratifiedDomain,
    field: ValueField,
    dynamics: DynamicsField,
    path: str | Path,
    traces: Sequence[Trace] = (),
    *,
    title: str = "HJSD value function",
) -> Path:
    """Write the value field; traces, when given, go to :func:`traces_path`."""

    grid = domain.grid
    target = Path(path)
    counts = list(grid.counts) + [1] * (3 - grid.dimension)
    stratum_dim = np.array([c.k for c in domain.components], dtype=np.intp)[field.component]
    stratum, running_cost = owning_strata(domain)
    try:
        with target.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"{VTK_HEADER}\n{title}\nASCII\nDATASET STRUCTURED_GRID\n")
            handle.write(f"DIMENSIONS {counts[0]} {counts[1]} {counts[2]}\n")
            handle.write(f"POINTS {grid.n_nodes} double\n")
            np.savetxt(handle, _pad3(grid.node_coordinates()), fmt=FLOAT_FORMAT)
            handle.write(f"POINT_DATA {grid.n_nodes}\n")
            _write_scalars(handle, "value", "double", field.values, FLOAT_FORMAT)
            _write_scalars(handle, "stratum_dim", "int", stratum_dim, "%d")
            handle.write("VECTORS optimal_dynamics double\n")
            np.savetxt(handle, _pad3(dynamics.vectors), fmt=FLOAT_FORMAT)
            _write_scalars(handle, "stratum", "int", stratum, "%d")
            _write_scalars(handle, "running_cost", "double", running_cost, FLOAT_FORMAT)
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc.strerror or exc}") from exc
    LOGGER.info("Wrote value field to %s", target)
    if traces:
        write_traces_vtk(traces, traces_path(target), dimension=grid.dimension)
    return target


def write_traces_vtk(traces: Sequence[Trace], path: str | Path, *, dimension: int = 3) -> Path:
    """Polylines of ``traces`` as a ``POLYDATA`` file."""

    target = Path(path)
    points = [np.asarray(trace.points, dtype=float).reshape(-1, dimension) for trace in traces]
    total = sum(block.shape[0] for block in points)
    try:
        with target.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"{VTK_HEADER}\nHJSD optimal trajectories\nASCII\nDATASET POLYDATA\n")
            handle.write(f"POINTS {total} double\n")
            for block in points:
                np.savetxt(handle, _pad3(block), fmt=FLOAT_FORMAT)
            handle.write(f"LINES {len(points)} {total + len(points)}\n")
            offset = 0
            for block in points:
                ids = " ".join(str(offset + i) for i in range(block.shape[0]))
                handle.write(f"{block.shape[0]} {ids}\n")
                offset += block.shape[0]
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc.strerror or exc}") from exc
    LOGGER.info("Wrote %d trajectories to %s", len(points), target)
    return target


__all__ = ["write_vtk", "write_traces_vtk", "traces_path", "owning_strata", "VTK_HEADER"]
