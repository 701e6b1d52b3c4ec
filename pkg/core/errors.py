"""Exception hierarchy for the stratified HJB solver.

Every error raised on purpose derives from :class:`HJSDError`, which is a
``ValueError`` so callers that only care about "bad input" can keep catching
that. The ``exit_code`` attribute is what the command-line front end returns.
"""

from __future__ import annotations

from typing import Sequence


class HJSDError(ValueError):
    """Base class for all solver errors."""

    exit_code: int = 1


class ProblemFileError(HJSDError):
    """Syntax or header error in a ``.hjsd`` file."""

    exit_code = 1

    def __init__(self, message: str, *, line: int | None = None, source: str | None = None) -> None:
        self.line = line
        self.source = source
        location = ""
        if source is not None:
            location = f"{source}:"
        if line is not None:
            location = f"{location}{line}: "
        elif location:
            location = f"{location} "
        super().__init__(f"{location}{message}")


class ExpressionError(HJSDError):
    """Base class for expression parsing and evaluation failures."""

    exit_code = 1


class ExpressionSyntaxError(ExpressionError):
    """Raised when an expression cannot be parsed; ``offset`` is a byte offset."""

    def __init__(self, message: str, *, text: str, offset: int) -> None:
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {text!r}")


class ExpressionEvaluationError(ExpressionError):
    """Raised when an expression evaluates to a non-finite value."""

    def __init__(self, message: str, *, text: str, point: Sequence[float]) -> None:
        self.text = text
        self.point = tuple(float(value) for value in point)
        coords = ", ".join(f"{value:.6g}" for value in self.point)
        super().__init__(f"{message} evaluating {text!r} at ({coords})")


class ConfigError(HJSDError):
    """Invalid solver configuration (time step, tolerance, penalty...)."""

    exit_code = 1


class StratificationError(HJSDError):
    """The declared geometry does not describe a usable stratification."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        *,
        line: int | None = None,
        node: Sequence[int] | None = None,
    ) -> None:
        self.line = line
        self.node = None if node is None else tuple(int(i) for i in node)
        prefix = f"line {line}: " if line is not None else ""
        suffix = f" (node {self.node})" if self.node is not None else ""
        super().__init__(f"{prefix}{message}{suffix}")


class OutputError(HJSDError):
    """A result file could not be written."""

    exit_code = 1


class OutOfDomainError(HJSDError):
    """A point lies outside the box or outside a component's closure."""

    def __init__(self, message: str, *, point: Sequence[float]) -> None:
        self.point = tuple(float(value) for value in point)
        super().__init__(f"{message}: {self.point}")


__all__ = [
    "HJSDError",
    "ProblemFileError",
    "ExpressionError",
    "ExpressionSyntaxError",
    "ExpressionEvaluationError",
    "ConfigError",
    "StratificationError",
    "OutputError",
    "OutOfDomainError",
]
