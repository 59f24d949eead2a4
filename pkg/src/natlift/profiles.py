"""Coefficient profiles as small expression trees in the energy density ``t``.

The grammar is closed on purpose: constants, ``t``, sums, products, integer
powers, reciprocals and ``exp``.  That is enough for every profile family we
sample and keeps differentiation exact through :class:`~natlift.jets.Jet`.

Profiles are usually written as infix strings::

    >>> a1 = parse_profile("1 + 0.5*t")
    >>> eval_jet(a1, 0.2).derivs
    (1.1, 0.5, 0.0, 0.0, 0.0)
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

from .errors import ProfileSyntaxError
from .jets import MAX_ORDER, Jet


class ScalarExpr:
    """Base class for expression nodes.  Supports Python arithmetic."""

    def _jet(self, tj: Jet) -> Jet:
        raise NotImplementedError

    def __call__(self, t):
        return eval_jet(self, t, order=0).value

    def __add__(self, other):
        return Add((self, _wrap(other)))

    def __radd__(self, other):
        return Add((_wrap(other), self))

    def __sub__(self, other):
        return Add((self, -_wrap(other)))

    def __rsub__(self, other):
        return Add((_wrap(other), -self))

    def __mul__(self, other):
        return Mul((self, _wrap(other)))

    def __rmul__(self, other):
        return Mul((_wrap(other), self))

    def __truediv__(self, other):
        return Mul((self, Recip(_wrap(other))))

    def __rtruediv__(self, other):
        return Mul((_wrap(other), Recip(self)))

    def __neg__(self):
        return Mul((Const(-1), self))

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return Pow(self, n)


def _wrap(x) -> ScalarExpr:
    if isinstance(x, ScalarExpr):
        return x
    if isinstance(x, Number):
        return Const(x)
    raise TypeError(f"cannot use {type(x).__name__} in a profile expression")


@dataclass(frozen=True, eq=True)
class Const(ScalarExpr):
    value: Number

    def _jet(self, tj):
        return Jet.constant(tj.value - tj.value + self.value, tj.order)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, eq=True)
class Var(ScalarExpr):
    def _jet(self, tj):
        return tj

    def __str__(self):
        return "t"


@dataclass(frozen=True, eq=True)
class Add(ScalarExpr):
    terms: tuple

    def _jet(self, tj):
        out = self.terms[0]._jet(tj)
        for term in self.terms[1:]:
            out = out + term._jet(tj)
        return out

    def __str__(self):
        return "(" + " + ".join(str(x) for x in self.terms) + ")"


@dataclass(frozen=True, eq=True)
class Mul(ScalarExpr):
    factors: tuple

    def _jet(self, tj):
        out = self.factors[0]._jet(tj)
        for f in self.factors[1:]:
            out = out * f._jet(tj)
        return out

    def __str__(self):
        return "*".join(str(x) for x in self.factors)


@dataclass(frozen=True, eq=True)
class Pow(ScalarExpr):
    base: ScalarExpr
    exponent: int

    def _jet(self, tj):
        return self.base._jet(tj) ** self.exponent

    def __str__(self):
        return f"{self.base}**{self.exponent}"


@dataclass(frozen=True, eq=True)
class Recip(ScalarExpr):
    arg: ScalarExpr

    def _jet(self, tj):
        return self.arg._jet(tj).reciprocal()

    def __str__(self):
        return f"1/({self.arg})"


@dataclass(frozen=True, eq=True)
class Exp(ScalarExpr):
    arg: ScalarExpr

    def _jet(self, tj):
        return self.arg._jet(tj).exp()

    def __str__(self):
        return f"exp({self.arg})"


T = Var()


def exp(x) -> ScalarExpr:
    return Exp(_wrap(x))


def eval_jet(expr: ScalarExpr, t, order: int = MAX_ORDER) -> Jet:
    """Evaluate ``expr`` and its first ``order`` derivatives at ``t``.

    Raises :class:`~natlift.errors.DomainError` when a reciprocal argument is
    within ``1e-12`` of zero.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in [0, {MAX_ORDER}], got {order}")
    return expr._jet(Jet.variable(t, order))


_BINOPS = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul", ast.Div: "div", ast.Pow: "pow"}


def parse_profile(text: str, exact: bool = False) -> ScalarExpr:
    """Parse an infix profile string such as ``"1/(1+2*t)"`` or ``"exp(-t)"``.

    With ``exact=True`` numeric literals become :class:`~fractions.Fraction`
    so rational inputs evaluate without rounding.
    """
    if not isinstance(text, str):
        if isinstance(text, Number):
            return Const(Fraction(text) if exact else text)
        raise ProfileSyntaxError(f"profile must be a string, got {type(text).__name__}")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ProfileSyntaxError(f"cannot parse profile {text!r}: {exc.msg}") from None
    return _convert(tree.body, text, exact)


def _literal(node, source, exact):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        if exact:
            return Fraction(ast.get_source_segment(source, node) or str(node.value))
        return node.value
    return None


def _convert(node, source: str, exact: bool) -> ScalarExpr:
    lit = _literal(node, source, exact)
    if lit is not None:
        return Const(lit)
    if isinstance(node, ast.Name):
        if node.id == "t":
            return T
        raise ProfileSyntaxError(f"unknown name {node.id!r} in profile {source!r}; only 't' is allowed")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _convert(node.operand, source, exact)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left = _convert(node.left, source, exact)
        if op == "pow":
            n = _integer_exponent(node.right, source)
            return left**n
        right = _convert(node.right, source, exact)
        if op == "add":
            return left + right
        if op == "sub":
            return left - right
        if op == "mul":
            return left * right
        return left / right
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "exp":
        if len(node.args) != 1 or node.keywords:
            raise ProfileSyntaxError(f"exp takes exactly one argument in {source!r}")
        return exp(_convert(node.args[0], source, exact))
    raise ProfileSyntaxError(f"unsupported construct {ast.dump(node)[:40]}... in profile {source!r}")


def _integer_exponent(node, source) -> int:
    sign = 1
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        sign, node = -1, node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        value = node.value
        if float(value).is_integer():
            return sign * int(value)
    raise ProfileSyntaxError(f"exponents must be integer literals in {source!r}")


def as_profile(x) -> ScalarExpr:
    """Accept an expression, a number or a profile string."""
    if isinstance(x, ScalarExpr):
        return x
    if isinstance(x, Number):
        return Const(x)
    return parse_profile(x)
