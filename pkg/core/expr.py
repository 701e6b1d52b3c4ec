"""Parser and evaluator for the symbolic speed and cost functions.

Grammar (no whitespace allowed, the problem files are whitespace delimited)::

    sum      := product (('+' | '-') product)*
    product  := unary (('*' | '/') unary)*
    unary    := ('-' | '+') unary | power
    power    := atom ('^' exponent)*
    exponent := ('-' | '+') exponent | atom
    atom     := number | 'x' | 'y' | 'z' | 'pi'
              | name '(' sum (',' sum)? ')' | '(' sum ')'

``^`` binds tightest, then unary minus, so ``-2^2`` is ``-4``. All binary
operators are left-associative, ``^`` included: ``2^3^2`` is ``(2^3)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Final, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import ExpressionEvaluationError, ExpressionSyntaxError

VARIABLES: Final[Tuple[str, ...]] = ("x", "y", "z")

_FUNCTIONS: Final[Mapping[str, Tuple[int, Callable[..., np.ndarray]]]] = {
    "abs": (1, np.abs),
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "sqrt": (1, np.sqrt),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}

_BINARY: Final[Mapping[str, Callable[[np.ndarray, np.ndarray], np.ndarray]]] = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}

_TOKEN = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
)


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    name: str  # only "pi"


@dataclass(frozen=True)
class Negate:
    operand: "Node"


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


Node = Union[Number, Variable, Constant, Negate, BinaryOp, Call]


@dataclass(frozen=True)
class ExpressionTree:
    """A parsed expression together with the text it came from."""

    root: Node
    text: str

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(_collect_variables(self.root))

    @property
    def is_constant(self) -> bool:
        return not self.variables

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(
                f"unexpected character {text[position]!r}", text=text, offset=position
            )
        kind = match.lastgroup or "op"
        tokens.append(_Token(kind=kind, text=match.group(), offset=position))
        position = match.end()
    tokens.append(_Token(kind="end", text="", offset=len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _accept(self, *ops: str) -> _Token | None:
        token = self.current
        if token.kind == "op" and token.text in ops:
            return self._advance()
        return None

    def _expect(self, op: str) -> None:
        if self._accept(op) is None:
            self._fail(f"expected {op!r}")

    def _fail(self, message: str) -> None:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ExpressionSyntaxError(f"{message}, found {found}", text=self.text, offset=token.offset)

    def parse(self) -> Node:
        node = self._sum()
        if self.current.kind != "end":
            self._fail("unexpected trailing input")
        return node

    def _sum(self) -> Node:
        node = self._product()
        while (token := self._accept("+", "-")) is not None:
            node = BinaryOp(token.text, node, self._product())
        return node

    def _product(self) -> Node:
        node = self._unary()
        while (token := self._accept("*", "/")) is not None:
            node = BinaryOp(token.text, node, self._unary())
        return node

    def _unary(self) -> Node:
        if self._accept("-") is not None:
            return Negate(self._unary())
        if self._accept("+") is not None:
            return self._unary()
        return self._power()

    def _power(self) -> Node:
        node = self._atom()
        while self._accept("^") is not None:
            node = BinaryOp("^", node, self._exponent())
        return node

    def _exponent(self) -> Node:
        if self._accept("-") is not None:
            return Negate(self._exponent())
        if self._accept("+") is not None:
            return self._exponent()
        return self._atom()

    def _atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Number(float(token.text))
        if token.kind == "name":
            return self._name()
        if self._accept("(") is not None:
            node = self._sum()
            self._expect(")")
            return node
        self._fail("expected a number, variable, function or '('")
        raise AssertionError("unreachable")

    def _name(self) -> Node:
        token = self._advance()
        name = token.text
        if name in VARIABLES:
            return Variable(name)
        if name == "pi":
            return Constant(name)
        if name not in _FUNCTIONS:
            raise ExpressionSyntaxError(f"unknown identifier {name!r}", text=self.text, offset=token.offset)
        self._expect("(")
        args = [self._sum()]
        while self._accept(",") is not None:
            args.append(self._sum())
        self._expect(")")
        arity = _FUNCTIONS[name][0]
        if len(args) != arity:
            raise ExpressionSyntaxError(
                f"function {name!r} takes {arity} argument(s), got {len(args)}",
                text=self.text,
                offset=token.offset,
            )
        return Call(name, tuple(args))


def parse_expression(text: str) -> ExpressionTree:
    """Parse ``text`` into an :class:`ExpressionTree`."""

    if not text:
        raise ExpressionSyntaxError("empty expression", text=text, offset=0)
    for offset, char in enumerate(text):
        if char.isspace():
            raise ExpressionSyntaxError("whitespace is not allowed", text=text, offset=offset)
    return ExpressionTree(root=_Parser(text).parse(), text=text)


def bind(tree: ExpressionTree, dimension: int) -> ExpressionTree:
    """Check that ``tree`` only uses variables available in ``dimension``."""

    allowed = set(VARIABLES[:dimension])
    extra = sorted(tree.variables - allowed)
    if extra:
        offset = max(tree.text.find(extra[0]), 0)
        raise ExpressionSyntaxError(
            f"variable {extra[0]!r} is not available in a {dimension}D problem",
            text=tree.text,
            offset=offset,
        )
    return tree


def _collect_variables(node: Node) -> set[str]:
    if isinstance(node, Variable):
        return {node.name}
    if isinstance(node, Negate):
        return _collect_variables(node.operand)
    if isinstance(node, BinaryOp):
        return _collect_variables(node.left) | _collect_variables(node.right)
    if isinstance(node, Call):
        found: set[str] = set()
        for arg in node.args:
            found |= _collect_variables(arg)
        return found
    return set()


def _eval_node(node: Node, coords: Mapping[str, np.ndarray], size: int) -> np.ndarray:
    if isinstance(node, Number):
        return np.full(size, node.value)
    if isinstance(node, Variable):
        return coords[node.name]
    if isinstance(node, Constant):
        return np.full(size, math.pi)
    if isinstance(node, Negate):
        return np.negative(_eval_node(node.operand, coords, size))
    if isinstance(node, BinaryOp):
        left = _eval_node(node.left, coords, size)
        right = _eval_node(node.right, coords, size)
        return _BINARY[node.op](left, right)
    if isinstance(node, Call):
        func = _FUNCTIONS[node.name][1]
        return func(*(_eval_node(arg, coords, size) for arg in node.args))
    raise TypeError(f"unknown expression node {node!r}")


def evaluate_many(tree: ExpressionTree, points: np.ndarray) -> np.ndarray:
    """Evaluate ``tree`` at every row of ``points`` (shape ``(n, d)``, d <= 3).

    Missing trailing coordinates are treated as zero.
    """

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    size = pts.shape[0]
    coords = {
        name: (pts[:, axis] if axis < pts.shape[1] else np.zeros(size))
        for axis, name in enumerate(VARIABLES)
    }
    with np.errstate(all="ignore"):
        values = np.asarray(_eval_node(tree.root, coords, size), dtype=float)
    finite = np.isfinite(values)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        padded = [coords[name][bad] for name in VARIABLES]
        raise ExpressionEvaluationError("non-finite result", text=tree.text, point=padded)
    return values


def evaluate(tree: ExpressionTree, point: Sequence[float]) -> float:
    """Evaluate ``tree`` at a single point (zero-padded to three coordinates)."""

    return float(evaluate_many(tree, np.asarray(point, dtype=float).reshape(1, -1))[0])


def to_text(tree: ExpressionTree | Node) -> str:
    """Pretty-print a tree, fully parenthesised; the output parses back."""

    node = tree.root if isinstance(tree, ExpressionTree) else tree
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, (Variable, Constant)):
        return node.name
    if isinstance(node, Negate):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinaryOp):
        return f"({to_text(node.left)}{node.op}{to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({','.join(to_text(arg) for arg in node.args)})"
    raise TypeError(f"unknown expression node {node!r}")


def constant(value: float) -> ExpressionTree:
    """Tree for a literal value (point costs, test fields)."""

    return parse_expression(repr(float(value)))


__all__ = [
    "ExpressionTree",
    "Number",
    "Variable",
    "Constant",
    "Negate",
    "BinaryOp",
    "Call",
    "VARIABLES",
    "parse_expression",
    "bind",
    "evaluate",
    "evaluate_many",
    "to_text",
    "constant",
]
