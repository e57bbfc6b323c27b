"""Recursive-descent parser for field expressions.

Grammar (``^`` binds tighter than unary minus and is right-associative)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Variables are ``x1 .. xd``. Functions: ``abs``, ``min``, ``max`` and
``step(e)``, which is 1 where ``e >= 0`` and 0 elsewhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from bskop.errors import ArityError, ExpressionSyntaxError, UnavailableDerivativeError
from bskop.fields import ScalarField, Singularity


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Node = Num | Var | Neg | BinOp | Call

FUNCTIONS = {"abs": (1, 1), "step": (1, 1), "min": (2, None), "max": (2, None)}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, d: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.d = d

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            found = text or "end of input"
            raise ExpressionSyntaxError(f"expected {value!r}, found {found!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text in ("+", "-"):
            self.take()
            operand = self.unary()
            return Neg(operand) if text == "-" else operand
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.take()
        if kind == "num":
            value = float(text)
            if not np.isfinite(value):
                raise ExpressionSyntaxError(f"number {text!r} overflows", pos)
            return Num(value)
        if kind == "name":
            if text in FUNCTIONS:
                return self.call(text, pos)
            m = re.fullmatch(r"x(\d+)", text)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= self.d:
                    raise ArityError(f"variable {text} outside x1..x{self.d}", pos)
                return Var(index)
            raise ExpressionSyntaxError(f"unknown name {text!r}", pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = text or "end of input"
        raise ExpressionSyntaxError(f"unexpected {found!r}", pos)

    def call(self, name: str, pos: int) -> Node:
        self.expect("(")
        if self.peek()[0] == "op" and self.peek()[1] == ")":
            self.take()
            raise ArityError(f"{name} takes at least {FUNCTIONS[name][0]} argument(s)", pos)
        args = [self.expr()]
        while self.peek()[0] == "op" and self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.expect(")")
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ArityError(f"{name} takes {lo}{'' if hi == lo else '+'} argument(s)", pos)
        return Call(name, tuple(args))


def parse_expression(text: str, d: int) -> Node:
    """Parse ``text`` into an expression tree over ``x1..xd``."""
    return _Parser(text, d).parse()


def to_text(node: Node) -> str:
    """Fully parenthesised rendering that re-parses to an equal tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    return f"{node.name}({', '.join(to_text(a) for a in node.args)})"


def evaluate(node: Node, x: np.ndarray) -> np.ndarray:
    """Evaluate on points ``x`` of shape ``(..., d)``."""
    if isinstance(node, Num):
        return np.full(x.shape[:-1], node.value)
    if isinstance(node, Var):
        return x[..., node.index - 1]
    if isinstance(node, Neg):
        return -evaluate(node.operand, x)
    if isinstance(node, BinOp):
        a, b = evaluate(node.left, x), evaluate(node.right, x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            return np.power(a, b)
    args = [evaluate(a, x) for a in node.args]
    if node.name == "abs":
        return np.abs(args[0])
    if node.name == "step":
        return (args[0] >= 0.0).astype(float)
    reducer = np.minimum if node.name == "min" else np.maximum
    out = args[0]
    for a in args[1:]:
        out = reducer(out, a)
    return out


def depends_on(node: Node, index: int) -> bool:
    if isinstance(node, Num):
        return False
    if isinstance(node, Var):
        return node.index == index
    if isinstance(node, Neg):
        return depends_on(node.operand, index)
    if isinstance(node, BinOp):
        return depends_on(node.left, index) or depends_on(node.right, index)
    return any(depends_on(a, index) for a in node.args)


# -- symbolic differentiation with light constant folding --------------------------

ZERO, ONE = Num(0.0), Num(1.0)


def _add(a: Node, b: Node) -> Node:
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a: Node, b: Node) -> Node:
    if b == ZERO:
        return a
    if a == ZERO:
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return BinOp("-", a, b)


def _mul(a: Node, b: Node) -> Node:
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return BinOp("*", a, b)


def _div(a: Node, b: Node) -> Node:
    if a == ZERO:
        return ZERO
    if b == ONE:
        return a
    return BinOp("/", a, b)


def _neg(a: Node) -> Node:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def differentiate(node: Node, index: int) -> Node:
    """Partial derivative with respect to ``x<index>``.

    Raises :class:`UnavailableDerivativeError` when a non-smooth function or a
    variable exponent lies on the differentiated path.
    """
    if not depends_on(node, index):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Neg):
        return _neg(differentiate(node.operand, index))
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = differentiate(a, index), differentiate(b, index)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if node.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), BinOp("^", b, Num(2.0)))
        if depends_on(b, index):
            raise UnavailableDerivativeError(
                f"exponent {to_text(b)} depends on x{index}; no closed-form partial"
            )
        return _mul(_mul(b, BinOp("^", a, _sub(b, ONE))), da)
    raise UnavailableDerivativeError(f"{node.name}() is not differentiable along x{index}")


def affine_form(node: Node, d: int):
    """``(coefficients, constant)`` if ``node`` is affine in the variables, else ``None``."""
    if isinstance(node, Num):
        return np.zeros(d), node.value
    if isinstance(node, Var):
        c = np.zeros(d)
        c[node.index - 1] = 1.0
        return c, 0.0
    if isinstance(node, Neg):
        inner = affine_form(node.operand, d)
        return None if inner is None else (-inner[0], -inner[1])
    if isinstance(node, BinOp):
        a, b = affine_form(node.left, d), affine_form(node.right, d)
        if a is None or b is None:
            return None
        a_const, b_const = not np.any(a[0]), not np.any(b[0])
        if node.op == "+":
            return a[0] + b[0], a[1] + b[1]
        if node.op == "-":
            return a[0] - b[0], a[1] - b[1]
        if node.op == "*":
            if a_const:
                return a[1] * b[0], a[1] * b[1]
            if b_const:
                return b[1] * a[0], b[1] * a[1]
            return None
        if node.op == "/":
            return (a[0] / b[1], a[1] / b[1]) if b_const and b[1] != 0 else None
        if a_const and b_const:
            return np.zeros(d), float(a[1] ** b[1])
        return None
    if all(not depends_on(a, i) for a in node.args for i in range(1, d + 1)):
        return np.zeros(d), float(evaluate(node, np.zeros((d,))))
    return None


def _hyperplane(node: Node, d: int):
    form = affine_form(node, d)
    if form is None:
        return None
    coeffs, const = form
    nz = np.flatnonzero(coeffs)
    if len(nz) != 1:
        return None
    axis = int(nz[0])
    return axis, -const / coeffs[axis]


def find_singularities(node: Node, d: int) -> list[Singularity]:
    """Axis-aligned jumps and kinks of ``abs``/``step``/``min``/``max`` calls
    whose switching argument is affine in a single variable."""
    out = []
    if isinstance(node, Neg):
        out += find_singularities(node.operand, d)
    elif isinstance(node, BinOp):
        out += find_singularities(node.left, d) + find_singularities(node.right, d)
    elif isinstance(node, Call):
        for a in node.args:
            out += find_singularities(a, d)
        switches = []
        if node.name in ("abs", "step"):
            switches.append(node.args[0])
        else:
            for i, a in enumerate(node.args):
                for b in node.args[i + 1:]:
                    switches.append(BinOp("-", a, b))
        kind = "jump" if node.name == "step" else "kink"
        for s in switches:
            plane = _hyperplane(s, d)
            if plane is not None and 0.0 < plane[1] < 1.0:
                out.append(Singularity(plane[0], float(plane[1]), kind))
    return out


def field_from_tree(node: Node, d: int, label: str | None = None) -> ScalarField:
    """Wrap an expression tree as a field with symbolic partials."""

    def partials(alpha):
        if any(a > 1 for a in alpha):
            raise UnavailableDerivativeError("only multi-indices with entries 0 or 1 are supported")
        tree = node
        for i, a in enumerate(alpha):
            if a:
                tree = differentiate(tree, i + 1)
        return lambda x: evaluate(tree, np.asarray(x, dtype=float))

    return ScalarField(
        d,
        lambda x: evaluate(node, np.asarray(x, dtype=float)),
        label or to_text(node),
        find_singularities(node, d),
        partials=partials,
    )


def parse_function(text: str, d: int) -> ScalarField:
    """Parse an expression into a :class:`~bskop.fields.ScalarField` of arity ``d``."""
    return field_from_tree(parse_expression(text, d), d, text.strip())
