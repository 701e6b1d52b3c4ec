"""Core dataclasses shared by the loader, the solver and the writers."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Tuple

# Directive tags grouped by the problem dimension they are legal in.
TAGS_2D: Tuple[str, ...] = ("#P", "#LX", "#LY", "#S")
TAGS_3D: Tuple[str, ...] = ("#P", "#LXY", "#LYZ", "#LXZ", "#SX", "#SY", "#SZ", "#V")


@dataclass(frozen=True, order=True)
class ComponentId:
    """Identifier (k, j) of a connected component of the k-dimensional stratum."""

    k: int
    j: int

    def __str__(self) -> str:
        return f"({self.k},{self.j})"


@dataclass(frozen=True)
class ProblemHeader:
    """Grid and control-set sizes from the ``#HJSD2D`` / ``#HJSD3D`` line."""

    dimension: int
    counts: Tuple[int, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    control_sizes: Tuple[int, ...]  # N_A1, N_A2 (, N_A3)
    line: int = 1


@dataclass(frozen=True)
class Directive:
    """One component declaration from a problem file.

    ``numbers`` holds the geometric parameters in file order, ``speed`` and
    ``cost`` the raw expression text (``speed`` is ``None`` for ``#P``; the
    cost of a point is kept as text too so every component looks alike).
    """

    tag: str
    numbers: Tuple[float, ...]
    speed: str | None
    cost: str
    discount: float
    line: int


@dataclass(frozen=True)
class ProblemFile:
    header: ProblemHeader
    directives: Tuple[Directive, ...]
    source: str | None = None

    @property
    def dimension(self) -> int:
        return self.header.dimension


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one fixed-point solve.

    ``penalty`` and ``max_iterations`` may be left ``None`` and are filled by
    :func:`core.solver.resolve_config` from the domain.
    """

    h: float
    tau: float = 1e-6
    max_iterations: int | None = None
    threads: int = 1
    penalty: float | None = None
    stencil_cache_mb: int = 512


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding about the stratification (closure violations...)."""

    severity: str  # "warning" | "info"
    message: str
    line: int | None = None


@dataclass(frozen=True)
class Trace:
    """A traced optimal trajectory."""

    start: Tuple[float, ...]
    points: Tuple[Tuple[float, ...], ...]
    reason: str  # "max_steps" | "stationary" | "left_box"

    @property
    def end(self) -> Tuple[float, ...]:
        return self.points[-1]


@dataclass(frozen=True)
class RunSummary:
    """What a pipeline run reports back to the command line."""

    exit_code: int
    iterations: int
    residual: float
    converged: bool
    wall_time: float
    output: Path | None = None
    trajectory_output: Path | None = None
    diagnostics: Tuple[Diagnostic, ...] = ()
    point_values: Mapping[str, float] = field(default_factory=dict)
    residuals: Tuple[float, ...] = ()


__all__ = [
    "TAGS_2D",
    "TAGS_3D",
    "ComponentId",
    "ProblemHeader",
    "Directive",
    "ProblemFile",
    "SolverConfig",
    "Diagnostic",
    "Trace",
    "RunSummary",
]
