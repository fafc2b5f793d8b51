"""Exact rational functions over QQ on a coordinate chart.

Every coefficient in the engine is a :class:`ScalarField`: a reduced
quotient of two multivariate polynomials with rational coefficients.
Polynomials are sympy ``PolyElement`` objects in a ring ordered by graded
lexicographic order on the chart's coordinate order; the denominator is
kept monic under that order, so two scalar fields are equal as rational
functions iff their stored numerators and denominators are identical.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cached_property

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as _poly_ring

__all__ = [
    "Chart",
    "ScalarField",
    "ChartMismatchError",
    "ExpressionSyntaxError",
]


class ChartMismatchError(ValueError):
    """Raised when objects living on different charts are combined."""


class ExpressionSyntaxError(ValueError):
    """Raised for malformed expression strings.

    Carries the 1-based ``line`` and ``column`` of the offending token.
    """

    def __init__(self, message, text, pos):
        line = text.count("\n", 0, pos) + 1
        column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {column}")
        self.reason = message
        self.line = line
        self.column = column


class Chart:
    """An ordered list of coordinate names.

    Parameters
    ----------
    coords : sequence of str
        Distinct identifiers. Their order fixes the index of each
        coordinate and the monomial order used for normalization.
    """

    _NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

    def __init__(self, coords):
        coords = tuple(coords)
        if not coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(coords)) != len(coords):
            raise ValueError(f"coordinate names must be unique: {coords}")
        for name in coords:
            if not isinstance(name, str) or not self._NAME.match(name):
                raise ValueError(f"invalid coordinate name {name!r}")
        self.coords = coords
        self.dim = len(coords)
        self._index = {name: i for i, name in enumerate(coords)}
        self.ring, *gens = _poly_ring(",".join(coords), QQ, grlex)
        self._gens = tuple(gens)

    def __eq__(self, other):
        return isinstance(other, Chart) and self.coords == other.coords

    def __hash__(self):
        return hash(("Chart", self.coords))

    def __repr__(self):
        return f"Chart({list(self.coords)!r})"

    def __len__(self):
        return self.dim

    def index(self, name):
        """Position of coordinate ``name``; raises ``KeyError`` if unknown."""
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown coordinate {name!r} on {self!r}") from None

    def extend(self, *names):
        """A new chart with ``names`` appended."""
        return Chart(self.coords + tuple(names))

    # -- scalar constructors ---------------------------------------------

    @cached_property
    def zero(self):
        return ScalarField._raw(self, self.ring.zero, self.ring.one)

    @cached_property
    def one(self):
        return ScalarField._raw(self, self.ring.one, self.ring.one)

    def const(self, value):
        """The constant scalar field ``value`` (int, Fraction or str)."""
        if isinstance(value, ScalarField):
            self._check(value)
            return value
        value = Fraction(value)
        num = self.ring(QQ(value.numerator, value.denominator))
        return ScalarField._raw(self, num, self.ring.one)

    def coord(self, name):
        """The coordinate function ``name``."""
        return ScalarField._raw(self, self._gens[self.index(name)], self.ring.one)

    def coord_functions(self):
        return tuple(self.coord(name) for name in self.coords)

    def parse(self, text):
        """Parse an expression in the chart's coordinates.

        Grammar: identifiers, integer literals, ``+ - * /``, ``^`` with an
        integer exponent, and parentheses.
        """
        return _Parser(self, text).parse()

    def _check(self, other):
        if other.chart is not self and other.chart != self:
            raise ChartMismatchError(
                f"scalar on {other.chart!r} used with {self!r}"
            )


class ScalarField:
    """A rational function ``numer/denom`` in canonical form.

    Instances are immutable. Use :class:`Chart` methods to build them and
    ordinary arithmetic operators to combine them; plain ``int`` and
    ``Fraction`` operands are promoted to constants.
    """

    __slots__ = ("chart", "numer", "denom", "_hash")

    def __init__(self, chart, numer, denom=None):
        ring = chart.ring
        numer = ring(numer)
        denom = ring.one if denom is None else ring(denom)
        if not denom:
            raise ZeroDivisionError("denominator is the zero polynomial")
        self._set(chart, *_canonical(numer, denom, ring))

    @classmethod
    def _raw(cls, chart, numer, denom):
        obj = object.__new__(cls)
        obj._set(chart, numer, denom)
        return obj

    @classmethod
    def _make(cls, chart, numer, denom):
        return cls._raw(chart, *_canonical(numer, denom, chart.ring))

    def _set(self, chart, numer, denom):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "numer", numer)
        object.__setattr__(self, "denom", denom)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarField is immutable")

    # -- coercion ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ScalarField):
            self.chart._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.numer:
            return self
        if not self.numer:
            return other
        if self.denom == other.denom:
            if self.denom == 1:
                return ScalarField._raw(self.chart, self.numer + other.numer, self.denom)
            return ScalarField._make(self.chart, self.numer + other.numer, self.denom)
        return ScalarField._make(
            self.chart,
            self.numer * other.denom + other.numer * self.denom,
            self.denom * other.denom,
        )

    __radd__ = __add__

    def __neg__(self):
        return ScalarField._raw(self.chart, -self.numer, self.denom)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.numer or not other.numer:
            return self.chart.zero
        if self.denom == 1 and other.denom == 1:
            return ScalarField._raw(self.chart, self.numer * other.numer, self.denom)
        return ScalarField._make(
            self.chart, self.numer * other.numer, self.denom * other.denom
        )

    __rmul__ = __mul__

    def inverse(self):
        if not self.numer:
            raise ZeroDivisionError("division by the zero scalar field")
        return ScalarField._make(self.chart, self.denom, self.numer)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return ScalarField._raw(self.chart, self.numer**exponent, self.denom**exponent)

    # -- calculus ------------------------------------------------------------

    def partial(self, coord):
        """Partial derivative with respect to a coordinate name or index."""
        i = coord if isinstance(coord, int) else self.chart.index(coord)
        if not 0 <= i < self.chart.dim:
            raise KeyError(f"coordinate index {i} out of range")
        x = self.chart._gens[i]
        dn = self.numer.diff(x)
        if self.denom == 1:
            return ScalarField._raw(self.chart, dn, self.denom)
        dd = self.denom.diff(x)
        if not dd:
            return ScalarField._make(self.chart, dn, self.denom)
        return ScalarField._make(
            self.chart, dn * self.denom - self.numer * dd, self.denom**2
        )

    def gradient(self):
        return tuple(self.partial(i) for i in range(self.chart.dim))

    # -- predicates ----------------------------------------------------------

    def is_zero(self):
        return not self.numer

    def __bool__(self):
        return bool(self.numer)

    def is_constant(self):
        return self.numer.is_ground and self.denom.is_ground

    def is_polynomial(self):
        return self.denom == 1

    def constant_value(self):
        """The value as a ``Fraction``; raises if not constant."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        c = QQ.to_sympy(self.numer.LC) if self.numer else 0
        return Fraction(str(c))

    def complexity(self):
        """Number of monomials in numerator and denominator."""
        return len(self.numer) + len(self.denom)

    def lift(self, chart):
        """The same function on a chart containing all of this chart's coordinates."""
        if chart == self.chart:
            return self
        missing = [c for c in self.chart.coords if c not in chart._index]
        if missing:
            raise ChartMismatchError(f"{chart!r} lacks coordinates {missing}")
        return ScalarField._make(chart, self.numer.set_ring(chart.ring), self.denom.set_ring(chart.ring))

    def depends_on(self, coord):
        i = coord if isinstance(coord, int) else self.chart.index(coord)
        return bool(self.numer.diff(self.chart._gens[i])) or bool(
            self.denom.diff(self.chart._gens[i])
        )

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, ScalarField):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.numer == other.numer
            and self.denom == other.denom
        )

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash((self.chart, self.numer, self.denom))
            )
        return self._hash

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        num = _render_poly(self.numer, self.chart.coords)
        if self.denom == 1:
            return num
        den = _render_poly(self.denom, self.chart.coords)
        if len(self.numer) > 1:
            num = f"({num})"
        if len(self.denom) > 1 or "*" in den or "^" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"ScalarField({str(self)!r})"

    def to_sympy(self):
        """The value as a sympy expression (for display only)."""
        return self.numer.as_expr() / self.denom.as_expr()


def _canonical(numer, denom, ring):
    if not numer:
        return ring.zero, ring.one
    if denom != 1:
        if not denom.is_ground:
            _, numer, denom = numer.cofactors(denom)
        lc = denom.LC
        if lc != 1:
            inv = ring.domain.quo(ring.domain.one, lc)
            numer = numer.mul_ground(inv)
            denom = denom.mul_ground(inv)
    return numer, denom


def _render_coeff(c):
    c = Fraction(int(c.numerator), int(c.denominator))
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_poly(p, names):
    if not p:
        return "0"
    out = []
    for monom, coeff in p.terms():
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        c = Fraction(int(coeff.numerator), int(coeff.denominator))
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not factors:
            body = _render_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _render_coeff(mag) + "*" + "*".join(factors)
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, chart, text):
        self.chart = chart
        self.text = text
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(1):
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2):
                self.tokens.append(("id", m.group(2), m.start(2)))
            elif m.group(3):
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise ExpressionSyntaxError(f"unexpected character {ch!r}", text, m.start(3))
                self.tokens.append(("op", ch, m.start(3)))
        self.tokens.append(("end", "", len(text)))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok):
        raise ExpressionSyntaxError(message, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression", self.peek())
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}", self.peek())
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    self.fail("division by zero", tok)
                value = value / rhs
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^", self.peek()[2]):
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be an integer literal", tok)
            exponent = sign * int(tok[1])
            if exponent < 0 and base.is_zero():
                self.fail("division by zero", tok)
            return base**exponent
        return base

    def atom(self):
        tok = self.take()
        if tok[0] == "num":
            return self.chart.const(int(tok[1]))
        if tok[0] == "id":
            if tok[1] not in self.chart._index:
                self.fail(f"unknown coordinate {tok[1]!r}", tok)
            return self.chart.coord(tok[1])
        if tok == ("op", "(", tok[2]):
            value = self.expr()
            close = self.take()
            if close[1] != ")" or close[0] != "op":
                self.fail("expected ')'", close)
            return value
        self.fail(f"unexpected token {tok[1]!r}" if tok[1] else "unexpected end of input", tok)
