"""Reference problems written as ``.hjsd`` text.

Four stratified experiments on the unit box ``[-1, 1]^N`` plus two benchmark
problems with known solutions (a point target reached at unit speed, and a
constant solution). Every generator takes a ``nodes`` override so the same
geometry can be solved on a coarse grid in tests.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Final, Sequence, Tuple

FIXTURES_DIR: Final[Path] = Path(__file__).resolve().parent / "fixtures"

NODES_2D: Final[int] = 201
NODES_3D: Final[int] = 101
CONTROLS_2D: Final[Tuple[int, int]] = (3, 64)
CONTROLS_3D: Final[Tuple[int, int, int]] = (3, 32, 32)
SMALL_DISCOUNT: Final[str] = "1e-4"


def _header(nodes: int, controls: Sequence[int]) -> str:
    if len(controls) == 2:
        return f"#HJSD2D {nodes} {nodes} -1 1 -1 1 {controls[0]} {controls[1]}"
    return f"#HJSD3D {nodes} {nodes} {nodes} -1 1 -1 1 -1 1 {controls[0]} {controls[1]} {controls[2]}"


def _lines(*rows: str) -> str:
    return "\n".join(rows) + "\n"


def segment_problem(nodes: int = NODES_2D, controls: Sequence[int] = CONTROLS_2D) -> str:
    """Target above a slow segment whose ends are cheap to stop at."""

    return _lines(
        "// free target, two expensive end-points, one slow segment",
        _header(nodes, controls),
        "#P 0 0.75 0 1",
        f"#P -0.5 0 2 {SMALL_DISCOUNT}",
        f"#P 0.5 0 2 {SMALL_DISCOUNT}",
        f"#LY 0 -0.5 0.5 1 0.25*(1+4*abs(x)) {SMALL_DISCOUNT}",
        f"#S 0.3 0.3 1 5 {SMALL_DISCOUNT}",
    )


def lanes_problem(nodes: int = NODES_2D, controls: Sequence[int] = CONTROLS_2D) -> str:
    """Two fast vertical lanes with different speeds."""

    return _lines(
        "// target above two vertical lanes of speed 2 (left) and 3 (right)",
        _header(nodes, controls),
        "#P 0 0.75 0 1",
        f"#P -0.5 -0.5 1 {SMALL_DISCOUNT}",
        f"#P -0.5 0.5 1 {SMALL_DISCOUNT}",
        f"#P 0.5 -0.5 1 {SMALL_DISCOUNT}",
        f"#P 0.5 0.5 1 {SMALL_DISCOUNT}",
        f"#LX -0.5 -0.5 0.5 2 1 {SMALL_DISCOUNT}",
        f"#LX 0.5 -0.5 0.5 3 1 {SMALL_DISCOUNT}",
        f"#S 0 0 1 1 {SMALL_DISCOUNT}",
    )


def fence_problem(nodes: int = NODES_2D, controls: Sequence[int] = CONTROLS_2D) -> str:
    """A fast square fence around an oscillating-cost interior."""

    return _lines(
        "// square of fast lines; the inner region has an oscillating cost",
        _header(nodes, controls),
        f"#P -0.75 -0.75 1 {SMALL_DISCOUNT}",
        f"#P -0.75 0.75 1 {SMALL_DISCOUNT}",
        f"#P 0.75 -0.75 1 {SMALL_DISCOUNT}",
        f"#P 0.75 0.75 1 {SMALL_DISCOUNT}",
        f"#LX -0.75 -0.75 0.75 10 1 {SMALL_DISCOUNT}",
        f"#LX 0.75 -0.75 0.75 10 1 {SMALL_DISCOUNT}",
        f"#LY -0.75 -0.75 0.75 10 1 {SMALL_DISCOUNT}",
        f"#LY 0.75 -0.75 0.75 10 1 {SMALL_DISCOUNT}",
        "#S 0 0 1 min(cos((8/3)*pi*x)+cos((8/3)*pi*y)+2,3) 1",
        f"#S 0.9 0.9 1 1 {SMALL_DISCOUNT}",
    )


def plate_problem(nodes: int = NODES_3D, controls: Sequence[int] = CONTROLS_3D) -> str:
    """A horizontal square plate with a vertical mast leading to the target."""

    return _lines(
        "// plate z=0 with framed edges, mast along z up to the target",
        _header(nodes, controls),
        "#P 0 0 0.5 0 1",
        f"#P 0 0 0 1 {SMALL_DISCOUNT}",
        f"#P -0.5 -0.5 0 1 {SMALL_DISCOUNT}",
        f"#P -0.5 0.5 0 1 {SMALL_DISCOUNT}",
        f"#P 0.5 -0.5 0 1 {SMALL_DISCOUNT}",
        f"#P 0.5 0.5 0 1 {SMALL_DISCOUNT}",
        f"#LXY 0 0 0 0.5 5 1 {SMALL_DISCOUNT}",
        f"#LXZ -0.5 0 -0.5 0.5 5 1 {SMALL_DISCOUNT}",
        f"#LXZ 0.5 0 -0.5 0.5 5 1 {SMALL_DISCOUNT}",
        f"#LYZ -0.5 0 -0.5 0.5 5 1 {SMALL_DISCOUNT}",
        f"#LYZ 0.5 0 -0.5 0.5 5 1 {SMALL_DISCOUNT}",
        f"#SZ 0 -0.5 0.5 -0.5 0.5 5 1 {SMALL_DISCOUNT}",
        f"#V 0.9 0.9 0.9 1 1 {SMALL_DISCOUNT}",
    )


def eikonal_problem(nodes: int = NODES_2D, controls: Sequence[int] = CONTROLS_2D) -> str:
    """Unit speed towards a free target at the origin; ``u`` approximates ``|x|``."""

    return _lines(
        _header(nodes, controls),
        "#P 0 0 0 1",
        f"#S 0.5 0.5 1 1 {SMALL_DISCOUNT}",
    )


def constant_problem(
    nodes: int = 11,
    controls: Sequence[int] = (3, 8),
    *,
    speed: str = "1",
    cost: str = "1",
    discount: float = 1.0,
) -> str:
    """A single region; with ``cost == discount`` the solution is ``u == 1``."""

    return _lines(_header(nodes, controls), f"#S 0 0 {speed} {cost} {discount:g}")


@dataclass(frozen=True)
class ReferenceProblem:
    name: str
    description: str
    generator: Callable[..., str]
    dimension: int = 2


REFERENCE_PROBLEMS: Final[Dict[str, ReferenceProblem]] = {
    problem.name: problem
    for problem in (
        ReferenceProblem("segment", "target with a slow segment", segment_problem),
        ReferenceProblem("lanes", "two lanes of different speed", lanes_problem),
        ReferenceProblem("fence", "fenced oscillating region", fence_problem),
        ReferenceProblem("plate", "plate and mast in 3D", plate_problem, dimension=3),
        ReferenceProblem("eikonal", "distance to the origin", eikonal_problem),
    )
}


def problem_text(name: str, nodes: int | None = None) -> str:
    try:
        problem = REFERENCE_PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown reference problem {name!r}; choose from {sorted(REFERENCE_PROBLEMS)}") from None
    return problem.generator() if nodes is None else problem.generator(nodes=nodes)


def write_problem_files(
    directory: str | os.PathLike[str] = FIXTURES_DIR,
    nodes: int | None = None,
) -> list[Path]:
    """Write every reference problem as ``<name>.hjsd`` into ``directory``."""

    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for name in REFERENCE_PROBLEMS:
        path = target / f"{name}.hjsd"
        path.write_text(problem_text(name, nodes), encoding="utf-8")
        written.append(path)
    return written


__all__ = [
    "ReferenceProblem",
    "REFERENCE_PROBLEMS",
    "FIXTURES_DIR",
    "segment_problem",
    "lanes_problem",
    "fence_problem",
    "plate_problem",
    "eikonal_problem",
    "constant_problem",
    "problem_text",
    "write_problem_files",
]
