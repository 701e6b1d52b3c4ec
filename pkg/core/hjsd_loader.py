"""Reader for ``.hjsd`` problem files.

A file is line oriented and whitespace delimited. Blank lines and lines whose
first token starts with ``//`` are ignored. The first remaining line is the
header, every other line is one component directive::

    #HJSD2D Nx Ny xmin xmax ymin ymax NA1 NA2
    #P  x y cost discount
    #LX x y0 y1 speed cost discount          (line x = const)
    #LY y x0 x1 speed cost discount          (line y = const)
    #S  x y speed cost discount              (flood-fill seed)

    #HJSD3D Nx Ny Nz xmin xmax ymin ymax zmin zmax NA1 NA2 NA3
    #P   x y z cost discount
    #LXY x y z0 z1 speed cost discount       (line along z)
    #LYZ y z x0 x1 speed cost discount       (line along x)
    #LXZ x z y0 y1 speed cost discount       (line along y)
    #SX  x y0 y1 z0 z1 speed cost discount   (plane x = const)
    #SY  y x0 x1 z0 z1 speed cost discount   (plane y = const)
    #SZ  z x0 x1 y0 y1 speed cost discount   (plane z = const)
    #V   x y z speed cost discount           (flood-fill seed)
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Final, Mapping, Sequence, Tuple

from .errors import ProblemFileError
from .models import TAGS_2D, TAGS_3D, Directive, ProblemFile, ProblemHeader

LOGGER = logging.getLogger(__name__)

COMMENT_PREFIX: Final[str] = "//"

# Number of geometric parameters per tag; every directive but #P then carries
# speed, cost and discount, #P carries cost and discount.
_GEOMETRY_FIELDS: Final[Mapping[int, Mapping[str, int]]] = {
    2: {"#P": 2, "#LX": 3, "#LY": 3, "#S": 2},
    3: {"#P": 3, "#LXY": 4, "#LYZ": 4, "#LXZ": 4, "#SX": 5, "#SY": 5, "#SZ": 5, "#V": 3},
}
_HEADER_TAGS: Final[Mapping[str, int]] = {"#HJSD2D": 2, "#HJSD3D": 3}
_MIN_CONTROLS: Final[Tuple[int, ...]] = (2, 3, 2)


def expected_field_count(tag: str, dimension: int) -> int:
    """Number of fields after ``tag`` in a ``dimension``-D file."""

    geometry = _GEOMETRY_FIELDS[dimension][tag]
    return geometry + (2 if tag == "#P" else 3)


def _to_float(token: str, *, what: str, line: int, source: str | None) -> float:
    try:
        return float(token)
    except ValueError:
        raise ProblemFileError(f"{what} must be a number, got {token!r}", line=line, source=source) from None


def _to_int(token: str, *, what: str, line: int, source: str | None) -> int:
    try:
        return int(token)
    except ValueError:
        raise ProblemFileError(f"{what} must be an integer, got {token!r}", line=line, source=source) from None


def _parse_header(tokens: Sequence[str], line: int, source: str | None) -> ProblemHeader:
    tag = tokens[0]
    if tag not in _HEADER_TAGS:
        raise ProblemFileError(
            f"first line must be a #HJSD2D or #HJSD3D header, found {tag!r}", line=line, source=source
        )
    dims = _HEADER_TAGS[tag]
    expected = dims + 2 * dims + dims
    fields = tokens[1:]
    if len(fields) != expected:
        raise ProblemFileError(
            f"{tag} expects {expected} fields, got {len(fields)}", line=line, source=source
        )
    counts = tuple(_to_int(fields[a], what=f"node count N{'xyz'[a]}", line=line, source=source) for a in range(dims))
    bounds = [
        _to_float(token, what="box bound", line=line, source=source) for token in fields[dims : 3 * dims]
    ]
    controls = tuple(
        _to_int(token, what="control-set size", line=line, source=source) for token in fields[3 * dims :]
    )

    for axis, count in enumerate(counts):
        if count < 2:
            raise ProblemFileError(f"N{'xyz'[axis]} must be at least 2, got {count}", line=line, source=source)
    lower = tuple(bounds[0::2])
    upper = tuple(bounds[1::2])
    for axis in range(dims):
        if not lower[axis] < upper[axis]:
            name = "xyz"[axis]
            raise ProblemFileError(
                f"{name}_min must be below {name}_max, got {lower[axis]} >= {upper[axis]}", line=line, source=source
            )
    for index, (size, minimum) in enumerate(zip(controls, _MIN_CONTROLS)):
        if size < minimum:
            raise ProblemFileError(
                f"N_A{index + 1} must be at least {minimum}, got {size}", line=line, source=source
            )

    return ProblemHeader(
        dimension=dims,
        counts=counts,
        lower=lower,
        upper=upper,
        control_sizes=controls,
        line=line,
    )


def _parse_directive(tokens: Sequence[str], dimension: int, line: int, source: str | None) -> Directive:
    tag = tokens[0]
    legal = TAGS_2D if dimension == 2 else TAGS_3D
    if tag not in legal:
        other = TAGS_3D if dimension == 2 else TAGS_2D
        if tag in other:
            raise ProblemFileError(
                f"{5 - dimension}D directive in {dimension}D file: {tag}", line=line, source=source
            )
        if tag in _HEADER_TAGS:
            raise ProblemFileError("duplicate header", line=line, source=source)
        raise ProblemFileError(f"unknown directive {tag!r}", line=line, source=source)

    fields = tokens[1:]
    expected = expected_field_count(tag, dimension)
    if len(fields) != expected:
        raise ProblemFileError(
            f"{tag} expects {expected} fields, got {len(fields)}", line=line, source=source
        )

    n_geometry = _GEOMETRY_FIELDS[dimension][tag]
    numbers = tuple(
        _to_float(token, what=f"{tag} coordinate", line=line, source=source) for token in fields[:n_geometry]
    )
    rest = fields[n_geometry:]
    if tag == "#P":
        speed, cost = None, rest[0]
    else:
        speed, cost = rest[0], rest[1]
    discount = _to_float(rest[-1], what=f"{tag} discount", line=line, source=source)
    if not discount > 0.0:
        raise ProblemFileError(f"discount must be positive, got {discount}", line=line, source=source)

    return Directive(tag=tag, numbers=numbers, speed=speed, cost=cost, discount=discount, line=line)


def parse_hjsd(text: str, *, source: str | None = None) -> ProblemFile:
    """Parse the contents of a ``.hjsd`` file.

    Expression fields are kept as text; they are parsed and bound to the
    problem dimension when the stratified domain is built.
    """

    header: ProblemHeader | None = None
    directives: list[Directive] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0].startswith(COMMENT_PREFIX):
            continue
        if header is None:
            header = _parse_header(tokens, number, source)
            continue
        directives.append(_parse_directive(tokens, header.dimension, number, source))

    if header is None:
        raise ProblemFileError("missing #HJSD2D/#HJSD3D header", source=source)

    LOGGER.debug("Parsed %d directives from %s", len(directives), source or "<text>")
    return ProblemFile(header=header, directives=tuple(directives), source=source)


def load_problem(path: str | Path) -> ProblemFile:
    """Read and parse a problem file from disk."""

    candidate = Path(path)
    if candidate.is_dir():
        raise ProblemFileError("problem path must point to a file, not a directory", source=str(candidate))
    if not candidate.exists():
        raise ProblemFileError("problem file not found", source=str(candidate))
    return parse_hjsd(candidate.read_text(encoding="utf-8"), source=str(candidate))


__all__ = ["parse_hjsd", "load_problem", "expected_field_count", "COMMENT_PREFIX"]
