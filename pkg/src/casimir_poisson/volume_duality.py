"""Volume-form duality, the Koszul operator and the Schouten bracket.

Given a volume form ``Ω`` on a chart, multivectors and forms are identified
by ``Ψ(P) = (-1)^{p(p-1)/2} i_P Ω`` with inverse ``Ψ⁻¹(η) = j_η Ω̃``.
``D = -Ψ⁻¹ ∘ d ∘ Ψ`` generates the Schouten bracket.

The Schouten bracket itself is available through three independent
computations (``method=``):

``"decomposable"``
    Leibniz expansion of coordinate decomposables into Lie brackets of
    vector fields. The default.
``"koszul"``
    Reconstructs ``[P, Q]`` from ``i_[P,Q] = [[i_P, d], i_Q]`` evaluated
    on the coordinate basis forms.
``"generator"``
    ``(-1)^p (D'(P∧Q) - D'(P)∧Q - (-1)^p P∧D'(Q))`` for a volume form,
    where ``D' = (-1)^{p-1} D`` on ``p``-vectors. With ``Ψ`` carrying the
    ``(-1)^{p(p-1)/2}`` sign, ``D`` alone does not generate the bracket
    through this identity; the Poisson test ``2Λ∧D(Λ) = D(Λ∧Λ)`` is
    insensitive to the difference.
"""

from __future__ import annotations

from itertools import combinations

from .exterior_calculus import (
    Form,
    Multivector,
    differential,
    exterior_derivative,
    interior_by_form,
    interior_by_multivector,
    pair,
    wedge,
)
from .scalar_field import ChartMismatchError

__all__ = [
    "VolumeStructure",
    "psi",
    "psi_inverse",
    "koszul_D",
    "schouten",
    "SharpMap",
    "bivector_sharp",
    "poisson_bracket",
    "jacobi_sum",
    "jacobi_violations",
    "is_poisson",
    "poisson_checks",
    "koszul_delta",
    "koszul_bracket_forms",
    "bivector_matrix",
]


def _sign(p):
    return -1 if (p * (p - 1) // 2) % 2 else 1


class VolumeStructure:
    """A volume form ``Omega`` together with its dual top multivector.

    Parameters
    ----------
    Omega : Form
        Top-grade form with a nonzero coefficient.
    """

    def __init__(self, Omega):
        chart = Omega.chart
        if Omega.grade != chart.dim:
            raise ValueError("a volume form must have the top grade")
        c = Omega.coefficient()
        if not c:
            raise ValueError("the volume form vanishes identically")
        self.chart = chart
        self.Omega = Omega
        self.OmegaDual = Multivector(chart, {tuple(range(chart.dim)): c.inverse()})

    @classmethod
    def standard(cls, chart):
        """``dx1 ∧ … ∧ dxm``."""
        return cls(Form(chart, {tuple(range(chart.dim)): chart.one}))

    def _check(self, t):
        if t.chart != self.chart:
            raise ChartMismatchError(f"{t.chart!r} vs volume on {self.chart!r}")

    def top_ratio(self, top_form):
        """The function ``h`` with ``top_form = h Ω``."""
        self._check(top_form)
        if top_form.grade != self.chart.dim:
            raise ValueError("top_ratio needs a top-grade form")
        return top_form.coefficient() / self.Omega.coefficient()


def psi(volume, P):
    """``Ψ(P) = (-1)^{p(p-1)/2} i_P Ω``."""
    volume._check(P)
    out = interior_by_multivector(P, volume.Omega)
    return out if _sign(P.grade) > 0 else -out


def psi_inverse(volume, eta):
    """``Ψ⁻¹(η) = j_η Ω̃``."""
    volume._check(eta)
    return interior_by_form(eta, volume.OmegaDual)


def koszul_D(volume, P):
    """``D(P) = -Ψ⁻¹(d Ψ(P))``, of degree ``-1``."""
    if P.grade == 0:
        return Multivector.zero(P.chart, 0)
    return -psi_inverse(volume, exterior_derivative(psi(volume, P)))


# -- Schouten bracket -----------------------------------------------------


def _vector(chart, i, coeff):
    return Multivector._from_clean(chart, 1, {(i,): coeff} if coeff else {})


def _coord_vectors(chart, key, coeff):
    """Decomposable factors ``[coeff ∂k0, ∂k1, …]`` of ``coeff ∂_key``."""
    vs = [_vector(chart, key[0], coeff)]
    vs.extend(_vector(chart, k, chart.one) for k in key[1:])
    return vs


def _lie_bracket(X, Y):
    """``[X, Y]`` for vector fields."""
    chart = X.chart
    out = {}
    for (i,), a in X.terms.items():
        for (j,), b in Y.terms.items():
            db = b.partial(i)
            if db:
                out[j] = out[j] + a * db if j in out else a * db
            da = a.partial(j)
            if da:
                out[i] = out[i] - b * da if i in out else -(b * da)
    return Multivector(chart, {(k,): v for k, v in out.items()})


def _wedge_all(chart, vectors):
    result = Multivector.scalar(chart.one)
    for v in vectors:
        result = wedge(result, v)
    return result


def _apply(X, h):
    acc = h.chart.zero
    for (i,), c in X.terms.items():
        dh = h.partial(i)
        if dh:
            acc = acc + c * dh
    return acc


def _schouten_with_function(P, h):
    """``[P, h]`` for ``p >= 1`` and a scalar ``h``."""
    chart = P.chart
    total = Multivector.zero(chart, P.grade - 1)
    p = P.grade
    for key, coeff in P.terms.items():
        xs = _coord_vectors(chart, key, coeff)
        for a, X in enumerate(xs):
            xh = _apply(X, h)
            if not xh:
                continue
            rest = _wedge_all(chart, xs[:a] + xs[a + 1 :])
            sign = -1 if (p - 1 - a) % 2 else 1
            total = total + rest * (xh if sign > 0 else -xh)
    return total


def _schouten_decomposable(P, Q):
    chart = P.chart
    p, q = P.grade, Q.grade
    if p == 0 and q == 0:
        return Multivector.zero(chart, 0)
    if q == 0:
        return _schouten_with_function(P, Q.coefficient())
    if p == 0:
        out = _schouten_with_function(Q, P.coefficient())
        return out if q % 2 == 0 else -out
    total = Multivector.zero(chart, p + q - 1)
    for kp, cp in P.terms.items():
        xs = _coord_vectors(chart, kp, cp)
        for kq, cq in Q.terms.items():
            ys = _coord_vectors(chart, kq, cq)
            for a, X in enumerate(xs):
                for b, Y in enumerate(ys):
                    if a > 0 and b > 0:
                        continue
                    lie = _lie_bracket(X, Y)
                    if not lie:
                        continue
                    term = wedge(
                        lie,
                        _wedge_all(chart, xs[:a] + xs[a + 1 :]),
                        _wedge_all(chart, ys[:b] + ys[b + 1 :]),
                    )
                    total = total + (term if (a + b) % 2 == 0 else -term)
    return total


def _koszul_operator(P, Q, eta):
    """``[[i_P, d], i_Q] eta`` expanded into its four terms."""
    p, q = P.grade, Q.grade
    iP = lambda t: interior_by_multivector(P, t)  # noqa: E731
    iQ = lambda t: interior_by_multivector(Q, t)  # noqa: E731
    d = exterior_derivative
    t1 = iP(d(iQ(eta)))
    t2 = d(iP(iQ(eta)))
    t3 = iQ(iP(d(eta)))
    t4 = iQ(d(iP(eta)))
    s2 = -1 if p % 2 else 1
    s3 = -1 if ((p - 1) * q) % 2 else 1
    s4 = -1 if ((p - 1) * q - p) % 2 else 1
    return _add_forms([(1, t1), (-s2, t2), (-s3, t3), (s4, t4)], eta.chart)


def _add_forms(signed, chart):
    total = None
    for s, t in signed:
        if not t:
            continue
        t = t if s > 0 else -t
        total = t if total is None else total + t
    return total if total is not None else Form.zero(chart, 0)


def _schouten_koszul(P, Q):
    chart = P.chart
    r = P.grade + Q.grade - 1
    if r < 0:
        return Multivector.zero(chart, 0)
    out = {}
    for key in combinations(range(chart.dim), r):
        eta = Form._from_clean(chart, r, {key: chart.one})
        value = _koszul_operator(P, Q, eta).coefficient()
        if value:
            # i_R dx^I = (-1)^{r(r-1)/2} R_I
            out[key] = value if _sign(r) > 0 else -value
    return Multivector._from_clean(chart, r, out)


def _graded_D(volume, P):
    # D itself satisfies the generator identity only after this grade sign
    out = koszul_D(volume, P)
    return out if P.grade % 2 == 1 else -out


def _schouten_generator(P, Q, volume):
    p = P.grade
    D = lambda t: _graded_D(volume, t)  # noqa: E731
    a = D(wedge(P, Q))
    b = wedge(D(P), Q)
    c = wedge(P, D(Q))
    inner = a - b - (c if p % 2 == 0 else -c)
    return inner if p % 2 == 0 else -inner


def schouten(P, Q, method="decomposable", volume=None):
    """The Schouten bracket ``[P, Q]`` of two multivector fields."""
    if not isinstance(P, Multivector) or not isinstance(Q, Multivector):
        raise TypeError("schouten needs two multivectors")
    if P.chart != Q.chart:
        raise ChartMismatchError(f"{P.chart!r} vs {Q.chart!r}")
    grade = P.grade + Q.grade - 1
    if grade > P.chart.dim:
        return Multivector.zero(P.chart, grade)
    if method == "decomposable":
        return _schouten_decomposable(P, Q)
    if method == "koszul":
        return _schouten_koszul(P, Q)
    if method == "generator":
        return _schouten_generator(P, Q, volume or VolumeStructure.standard(P.chart))
    raise ValueError(f"unknown Schouten method {method!r}")


# -- bivectors ------------------------------------------------------------


class SharpMap:
    """The map ``Λ^#`` of a bivector, extended multiplicatively to ``p``-forms.

    On 1-forms ``<β, Λ^#(α)> = Λ(α, β)``; on ``p``-forms
    ``Λ^#(ζ)(α1, …, αp) = (-1)^p ζ(Λ^#α1, …, Λ^#αp)``, which makes
    ``Λ^#(ζ∧η) = Λ^#(ζ) ∧ Λ^#(η)``.
    """

    def __init__(self, bivector):
        if bivector.grade != 2:
            raise ValueError("SharpMap needs a bivector")
        self.bivector = bivector
        self.chart = bivector.chart
        m = self.chart.dim
        rows = [dict() for _ in range(m)]
        for (i, j), c in bivector.terms.items():
            rows[i][j] = c
            rows[j][i] = -c
        self._images = {
            (i,): Multivector._from_clean(self.chart, 1, {(j,): c for j, c in rows[i].items()})
            for i in range(m)
        }
        self._images[()] = Multivector.scalar(self.chart.one)

    def basis_image(self, key):
        hit = self._images.get(key)
        if hit is None:
            hit = wedge(self._images[key[:1]], self.basis_image(key[1:]))
            self._images[key] = hit
        return hit

    def __call__(self, zeta):
        if not isinstance(zeta, Form):
            raise TypeError("Λ^# acts on forms")
        if zeta.chart != self.chart:
            raise ChartMismatchError(f"{zeta.chart!r} vs {self.chart!r}")
        total = Multivector.zero(self.chart, zeta.grade)
        for key, coeff in zeta.terms.items():
            total = total + self.basis_image(key) * coeff
        return total


def bivector_sharp(L, zeta):
    """``Λ^#(ζ)`` for a bivector ``L`` and a form of any grade."""
    return SharpMap(L)(zeta)


def bivector_matrix(L):
    """The antisymmetric coefficient matrix ``L(dx_i, dx_j)``."""
    chart = L.chart
    m = chart.dim
    M = [[chart.zero] * m for _ in range(m)]
    for (i, j), c in L.terms.items():
        M[i][j] = c
        M[j][i] = -c
    return M


def poisson_bracket(L, h1, h2):
    """``{h1, h2} = L(dh1, dh2)``."""
    return pair(wedge(differential(h1), differential(h2)), L)


def jacobi_sum(L, i, j, k, matrix=None):
    """``{x_i,{x_j,x_k}} + {x_j,{x_k,x_i}} + {x_k,{x_i,x_j}}`` in coordinates."""
    M = matrix or bivector_matrix(L)
    m = L.chart.dim
    acc = L.chart.zero
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        bc = M[b][c]
        if bc.is_constant():
            continue
        for l in range(m):
            al = M[a][l]
            if al:
                d = bc.partial(l)
                if d:
                    acc = acc + al * d
    return acc


def jacobi_violations(L, first_only=False):
    """Coordinate triples ``(i, j, k)`` whose Jacobi sum is nonzero."""
    M = bivector_matrix(L)
    bad = []
    for i, j, k in combinations(range(L.chart.dim), 3):
        if jacobi_sum(L, i, j, k, M):
            bad.append((i, j, k))
            if first_only:
                break
    return bad


def is_poisson(L, method="jacobi", volume=None):
    """Decide ``[L, L] = 0``.

    ``method`` is ``"jacobi"`` (coordinate triples), ``"schouten"``
    (decomposable Schouten bracket) or ``"generator"``
    (``2 L∧D(L) = D(L∧L)`` for ``volume``, standard by default).
    """
    if L.grade != 2:
        raise ValueError("is_poisson needs a bivector")
    if method == "jacobi":
        return not jacobi_violations(L, first_only=True)
    if method == "schouten":
        return schouten(L, L).is_zero()
    if method == "generator":
        volume = volume or VolumeStructure.standard(L.chart)
        lhs = wedge(L, koszul_D(volume, L)) * 2
        rhs = koszul_D(volume, wedge(L, L))
        return (lhs - rhs).is_zero()
    raise ValueError(f"unknown method {method!r}")


def poisson_checks(L, volume=None):
    """Run all three Poisson tests; returns a dict of booleans."""
    return {m: is_poisson(L, m, volume) for m in ("jacobi", "schouten", "generator")}


# -- Koszul bracket of forms ------------------------------------------------


def koszul_delta(L, eta):
    """``Δ η = i_L dη - d i_L η``."""
    a = interior_by_multivector(L, exterior_derivative(eta))
    b = exterior_derivative(interior_by_multivector(L, eta))
    return a - b


def koszul_bracket_forms(zeta, eta, L):
    """``{{ζ, η}} = (-1)^p (Δ(ζ∧η) - Δζ∧η - (-1)^p ζ∧Δη)``."""
    p = zeta.grade
    a = koszul_delta(L, wedge(zeta, eta))
    b = wedge(koszul_delta(L, zeta), eta) if zeta.grade >= 1 else None
    c = wedge(zeta, koszul_delta(L, eta)) if eta.grade >= 1 else None
    total = a
    if b is not None and b:
        total = total - b
    if c is not None and c:
        total = total - c if p % 2 == 0 else total + c
    return total if p % 2 == 0 else -total
