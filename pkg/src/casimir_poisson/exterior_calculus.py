"""Differential forms and multivector fields on a single chart.

A tensor of grade ``p`` is stored as a sparse map from strictly increasing
``p``-tuples of coordinate indices to nonzero :class:`ScalarField`
coefficients. ``Form({(0, 2): c})`` is ``c dx0 ∧ dx2`` and
``Multivector({(0, 2): c})`` is ``c ∂0 ∧ ∂2``.

Conventions
-----------
* ``pair(dx^I, ∂_J) = δ_IJ`` for increasing index tuples, i.e. the pairing
  of decomposables is the determinant of the 1-pairings.
* ``interior_by_multivector(X1∧…∧Xp, η) = i_X1 ∘ … ∘ i_Xp η``, with
  ``(i_X η)(Y, …) = η(X, Y, …)``.
* ``interior_by_form(α1∧…∧αq, P) = j_α1 ∘ … ∘ j_αq P``, with
  ``(j_α P)(β, …) = P(β, …, α)`` (``α`` fills the last slot).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .scalar_field import Chart, ChartMismatchError, ScalarField

__all__ = [
    "Form",
    "Multivector",
    "wedge",
    "wedge_power",
    "pair",
    "interior_by_multivector",
    "interior_by_form",
    "exterior_derivative",
    "differential",
    "apply_vector",
    "sort_sign",
]


def sort_sign(index):
    """Sort ``index``; return ``(sign, sorted_tuple)`` or ``(0, None)`` on repeats."""
    index = tuple(index)
    if len(set(index)) != len(index):
        return 0, None
    inversions = sum(
        1 for a in range(len(index)) for b in range(a + 1, len(index)) if index[a] > index[b]
    )
    return (-1 if inversions % 2 else 1), tuple(sorted(index))


@lru_cache(maxsize=None)
def _merge(left, right):
    """``e_left ∧ e_right = sign · e_merged``; ``None`` if they overlap."""
    if not left:
        return 1, right
    if not right:
        return 1, left
    sl = set(left)
    if any(j in sl for j in right):
        return None
    inversions = 0
    for j in right:
        inversions += sum(1 for i in left if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(left + right))


@lru_cache(maxsize=None)
def _contract_vector(k, index):
    """``i_{∂k} dx^index`` as ``(sign, rest)`` or ``None``."""
    try:
        a = index.index(k)
    except ValueError:
        return None
    return (-1 if a % 2 else 1), index[:a] + index[a + 1 :]


@lru_cache(maxsize=None)
def _contract_covector(k, index):
    """``j_{dxk} ∂_index`` as ``(sign, rest)`` or ``None``."""
    try:
        a = index.index(k)
    except ValueError:
        return None
    return (-1 if (len(index) - 1 - a) % 2 else 1), index[:a] + index[a + 1 :]


@lru_cache(maxsize=None)
def _i_basis(vec, form):
    # i_{∂j1∧…∧∂jp} = i_{∂j1} ∘ … ∘ i_{∂jp}: the last vector acts first
    sign, rest = 1, form
    for k in reversed(vec):
        hit = _contract_vector(k, rest)
        if hit is None:
            return None
        s, rest = hit
        sign *= s
    return sign, rest


@lru_cache(maxsize=None)
def _j_basis(form, vec):
    sign, rest = 1, vec
    for k in reversed(form):
        hit = _contract_covector(k, rest)
        if hit is None:
            return None
        s, rest = hit
        sign *= s
    return sign, rest


class _Tensor:
    __slots__ = ("chart", "grade", "terms")
    _prefix = "?"

    def __init__(self, chart, terms=None, grade=None):
        if not isinstance(chart, Chart):
            raise TypeError("first argument must be a Chart")
        clean = {}
        for key, coeff in (terms or {}).items():
            key = tuple(chart.index(k) if isinstance(k, str) else k for k in key)
            if grade is None:
                grade = len(key)
            elif len(key) != grade:
                raise ValueError(f"index {key} does not have grade {grade}")
            if any(not 0 <= k < chart.dim for k in key):
                raise ValueError(f"index {key} out of range for {chart!r}")
            if isinstance(coeff, str):
                coeff = chart.parse(coeff)
            elif not isinstance(coeff, ScalarField):
                coeff = chart.const(coeff)
            else:
                chart._check(coeff)
            sign, key = sort_sign(key)
            if not sign:
                continue
            if sign < 0:
                coeff = -coeff
            if key in clean:
                coeff = clean[key] + coeff
            clean[key] = coeff
        if grade is None:
            grade = 0
        if grade < 0:
            raise ValueError("negative grade")
        self.chart = chart
        self.grade = grade
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _from_clean(cls, chart, grade, terms):
        obj = object.__new__(cls)
        obj.chart = chart
        obj.grade = grade
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, chart, grade):
        return cls._from_clean(chart, grade, {})

    @classmethod
    def scalar(cls, value, chart=None):
        """A grade-0 tensor holding ``value``."""
        if chart is None:
            chart = value.chart
        value = chart.const(value) if not isinstance(value, ScalarField) else value
        return cls._from_clean(chart, 0, {(): value} if value else {})

    @classmethod
    def basis(cls, chart, *names):
        """The basis element for coordinates ``names`` (in the given order)."""
        return cls(chart, {tuple(names): chart.one}, grade=len(names))

    @classmethod
    def from_terms(cls, chart, terms):
        """Build from ``[(coefficient, (name, ...)), ...]``; repeated keys add up."""
        grade = None
        acc = None
        for coeff, names in terms:
            part = cls(chart, {tuple(names): coeff}, grade=len(names))
            if grade is None:
                grade = part.grade
            acc = part if acc is None else acc + part
        if acc is None:
            raise ValueError("from_terms needs at least one term")
        return acc

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatchError(f"{self.chart!r} vs {other.chart!r}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, ScalarField)) and self.grade == 0:
            other = type(self).scalar(other, self.chart)
        self._same(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.grade != self.grade:
            raise ValueError(f"cannot add grades {self.grade} and {other.grade}")
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                s = out[k] + v
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = v
        return type(self)._from_clean(self.chart, self.grade, out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._from_clean(self.chart, self.grade, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, factor):
        if isinstance(factor, _Tensor):
            return NotImplemented
        if not isinstance(factor, ScalarField):
            factor = self.chart.const(factor)
        else:
            self.chart._check(factor)
        if not factor:
            return type(self).zero(self.chart, self.grade)
        if factor == 1:
            return self
        return type(self)._from_clean(
            self.chart, self.grade, {k: v * factor for k, v in self.terms.items()}
        )

    __rmul__ = __mul__

    def __truediv__(self, factor):
        if not isinstance(factor, ScalarField):
            factor = self.chart.const(factor)
        return self * factor.inverse()

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if type(other) is not type(self):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.chart == other.chart
        return self.chart == other.chart and self.grade == other.grade and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.chart, self.grade, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, key):
        key = tuple(self.chart.index(k) if isinstance(k, str) else k for k in key)
        sign, skey = sort_sign(key)
        if not sign:
            return self.chart.zero
        value = self.terms.get(skey, self.chart.zero)
        return value if sign > 0 else -value

    def items(self):
        return sorted(self.terms.items())

    def coefficient(self):
        """The single coefficient of a grade-0 or top-grade tensor."""
        if self.grade == 0:
            return self.terms.get((), self.chart.zero)
        if self.grade == self.chart.dim:
            return self.terms.get(tuple(range(self.chart.dim)), self.chart.zero)
        raise ValueError("coefficient() needs grade 0 or the top grade")

    def map_coefficients(self, fn):
        out = {}
        for k, v in self.terms.items():
            w = fn(v)
            if w:
                out[k] = w
        return type(self)._from_clean(self.chart, self.grade, out)

    def lift(self, chart):
        """The same tensor on a chart that extends this one by trailing coordinates."""
        if chart.coords[: self.chart.dim] != self.chart.coords:
            raise ChartMismatchError(f"{chart!r} does not extend {self.chart!r}")
        return type(self)._from_clean(
            chart, self.grade, {k: v.lift(chart) for k, v in self.terms.items()}
        )

    def depends_on(self, coord):
        return any(v.depends_on(coord) for v in self.terms.values())

    def involves(self, coord):
        """True if some basis element contains coordinate ``coord``."""
        i = coord if isinstance(coord, int) else self.chart.index(coord)
        return any(i in k for k in self.terms)

    def _basis_str(self, key):
        raise NotImplementedError

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in self.items():
            basis = self._basis_str(key)
            c = str(coeff)
            if not key:
                parts.append(c)
                continue
            if c == "1":
                parts.append(basis)
            elif c == "-1":
                parts.append("-" + basis)
            else:
                if coeff.complexity() > 2 or c.startswith("-") and " " in c:
                    c = f"({c})"
                parts.append(f"{c}*{basis}")
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __repr__(self):
        return f"{type(self).__name__}[{self.grade}]({self})"


class Form(_Tensor):
    """A differential ``p``-form."""

    __slots__ = ()

    def _basis_str(self, key):
        return "∧".join("d" + self.chart.coords[i] for i in key)


class Multivector(_Tensor):
    """A ``p``-vector field."""

    __slots__ = ()

    def _basis_str(self, key):
        return "∧".join("∂" + self.chart.coords[i] for i in key)


def _check_pair(a, b, kind_a, kind_b):
    if not isinstance(a, kind_a) or not isinstance(b, kind_b):
        raise TypeError(
            f"expected {kind_a.__name__} and {kind_b.__name__}, got "
            f"{type(a).__name__} and {type(b).__name__}"
        )
    if a.chart != b.chart:
        raise ChartMismatchError(f"{a.chart!r} vs {b.chart!r}")


def _wedge2(a, b):
    if type(a) is not type(b):
        raise TypeError("wedge needs two forms or two multivectors")
    if a.chart != b.chart:
        raise ChartMismatchError(f"{a.chart!r} vs {b.chart!r}")
    grade = a.grade + b.grade
    if not a.terms or not b.terms or grade > a.chart.dim:
        return type(a).zero(a.chart, grade)
    out = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            hit = _merge(ka, kb)
            if hit is None:
                continue
            sign, key = hit
            term = va * vb
            if sign < 0:
                term = -term
            if key in out:
                out[key] = out[key] + term
            else:
                out[key] = term
    return type(a)._from_clean(a.chart, grade, {k: v for k, v in out.items() if v})


def wedge(*tensors):
    """Exterior product of forms (or of multivectors), left to right."""
    if not tensors:
        raise ValueError("wedge of nothing")
    result = tensors[0]
    for t in tensors[1:]:
        result = _wedge2(result, t)
    return result


def wedge_power(t, k, divide_factorial=False):
    """``t^k`` (or ``t^k/k!``); ``t^0`` is the constant 1."""
    if k < 0:
        return type(t).zero(t.chart, 0)
    result = type(t).scalar(t.chart.one)
    for j in range(1, k + 1):
        result = wedge(result, t)
        if divide_factorial:
            result = result * Fraction(1, j)
    return result


def pair(eta, P):
    """The natural pairing ``<eta, P>``; zero when grades differ."""
    _check_pair(eta, P, Form, Multivector)
    if eta.grade != P.grade:
        return eta.chart.zero
    small, large = (eta.terms, P.terms) if len(eta.terms) <= len(P.terms) else (P.terms, eta.terms)
    acc = eta.chart.zero
    for k, v in small.items():
        w = large.get(k)
        if w is not None:
            acc = acc + v * w
    return acc


def interior_by_multivector(P, eta):
    """``i_P eta``; the zero form when ``grade(P) > grade(eta)``."""
    _check_pair(P, eta, Multivector, Form)
    grade = eta.grade - P.grade
    if grade < 0 or not P.terms or not eta.terms:
        return Form.zero(eta.chart, max(grade, 0))
    out = {}
    for kp, vp in P.terms.items():
        for ke, ve in eta.terms.items():
            hit = _i_basis(kp, ke)
            if hit is None:
                continue
            sign, key = hit
            term = vp * ve
            if sign < 0:
                term = -term
            out[key] = out[key] + term if key in out else term
    return Form._from_clean(eta.chart, grade, {k: v for k, v in out.items() if v})


def interior_by_form(eta, P):
    """``j_eta P``; the zero multivector when ``grade(eta) > grade(P)``."""
    _check_pair(eta, P, Form, Multivector)
    grade = P.grade - eta.grade
    if grade < 0 or not P.terms or not eta.terms:
        return Multivector.zero(P.chart, max(grade, 0))
    out = {}
    for ke, ve in eta.terms.items():
        for kp, vp in P.terms.items():
            hit = _j_basis(ke, kp)
            if hit is None:
                continue
            sign, key = hit
            term = vp * ve
            if sign < 0:
                term = -term
            out[key] = out[key] + term if key in out else term
    return Multivector._from_clean(P.chart, grade, {k: v for k, v in out.items() if v})


def exterior_derivative(eta):
    """``d eta``."""
    if not isinstance(eta, Form):
        raise TypeError("exterior_derivative needs a Form")
    chart = eta.chart
    grade = eta.grade + 1
    if grade > chart.dim or not eta.terms:
        return Form.zero(chart, grade)
    out = {}
    for key, coeff in eta.terms.items():
        if coeff.is_constant():
            continue
        for k in range(chart.dim):
            if k in key:
                continue
            dc = coeff.partial(k)
            if not dc:
                continue
            sign, new = _merge((k,), key)
            term = dc if sign > 0 else -dc
            out[new] = out[new] + term if new in out else term
    return Form._from_clean(chart, grade, {k: v for k, v in out.items() if v})


def differential(h):
    """``dh`` for a scalar field ``h``."""
    return exterior_derivative(Form.scalar(h))


def apply_vector(X, h):
    """The derivative ``X(h)`` of a scalar along a vector field."""
    if X.grade != 1:
        raise ValueError("apply_vector needs a vector field")
    acc = h.chart.zero
    for (i,), c in X.terms.items():
        dh = h.partial(i)
        if dh:
            acc = acc + c * dh
    return acc


def all_indices(dim, grade):
    return list(combinations(range(dim), grade))
