"""Dirac brackets and nonholonomic almost Poisson brackets.

Both are instances of the even construction with a specific ``σ``:

* Dirac: ``σ = ω0 + Σ_{i<j} c_ij df_i∧df_j`` where ``(c_ij)`` inverts
  ``({f_i, f_j}_0)``; ``Λ0^#(σ) = Λ0 + Σ_{i<j} c_ij X_fi∧X_fj``.
* Nonholonomic: on a cotangent chart ``(q, p)`` with ``ω0 = Σ dp_s∧dq^s``,
  a Hamiltonian ``H`` and constraint 1-forms ``ζ^i = ζ^i_s dq^s``.
"""

from __future__ import annotations

from fractions import Fraction

from .casimir_even import _wedge_all, casimir_factor, kernel_phi
from .exterior_calculus import Form, Multivector, apply_vector, differential, pair, wedge, wedge_power
from .linalg import SingularMatrixError, inverse
from .symplectic_star import AlmostSymplectic
from .volume_duality import poisson_bracket

__all__ = [
    "DiracData",
    "dirac_sigma",
    "dirac_bivector",
    "dirac_bracket",
    "NonholonomicData",
    "nonholonomic_bivector",
    "nonholonomic_sigma",
    "nonholonomic_bracket",
    "nonholonomic_kernel_forms",
    "nonholonomic_factor",
    "nonholonomic_phi",
]


class DiracData:
    """Second-class constraints ``f_1, …, f_{2n-2k}`` on a symplectic chart."""

    def __init__(self, structure, constraints):
        self.structure = structure
        self.chart = structure.chart
        self.constraints = tuple(constraints)
        r = len(self.constraints)
        if r == 0 or r % 2:
            raise ValueError(f"need a nonzero even number of constraints, got {r}")
        self.k = structure.n - r // 2
        L0 = structure.lambda0
        self.gram = [[poisson_bracket(L0, a, b) for b in self.constraints] for a in self.constraints]
        try:
            self.cmatrix = inverse(self.gram, self.chart)
        except SingularMatrixError:
            raise SingularMatrixError("the matrix ({f_i, f_j}_0) is singular") from None
        self.f = casimir_factor(structure, self.constraints)


def dirac_sigma(data):
    """``ω0 + Σ_{i<j} c_ij df_i∧df_j``."""
    sigma = data.structure.omega0
    dfs = [differential(c) for c in data.constraints]
    r = len(dfs)
    for i in range(r):
        for j in range(i + 1, r):
            c = data.cmatrix[i][j]
            if c:
                sigma = sigma + wedge(dfs[i], dfs[j]) * c
    return sigma


def dirac_bivector(data):
    """``Λ0 + Σ_{i<j} c_ij X_fi∧X_fj``."""
    s = data.structure
    X = [s.hamiltonian_vector(c) for c in data.constraints]
    out = s.lambda0
    for i in range(len(X)):
        for j in range(i + 1, len(X)):
            c = data.cmatrix[i][j]
            if c:
                out = out + wedge(X[i], X[j]) * c
    return out


def dirac_bracket(data, h1, h2):
    """``{h1, h2} Ω = (1/f) dh1∧dh2∧ω0^{k-1}/(k-1)!∧df1∧…``."""
    s = data.structure
    form = wedge(
        differential(h1),
        differential(h2),
        wedge_power(s.omega0, data.k - 1, divide_factorial=True),
        _wedge_all(data.chart, [differential(c) for c in data.constraints]),
    )
    return s.volume.top_ratio(form) / data.f


class NonholonomicData:
    """A Hamiltonian with linear constraints on the momenta.

    Parameters
    ----------
    chart : Chart
        Coordinates ``q1…qn, p1…pn`` named by ``qs`` and ``ps``.
    hamiltonian : ScalarField
    constraints : sequence of sequences
        Rows ``(ζ^i_1, …, ζ^i_n)`` of functions of ``q``.
    """

    def __init__(self, chart, qs, ps, hamiltonian, constraints):
        qs, ps = tuple(qs), tuple(ps)
        if len(qs) != len(ps) or len(qs) * 2 != chart.dim:
            raise ValueError("need n positions and n momenta covering the chart")
        self.chart = chart
        self.qs, self.ps = qs, ps
        self.n = len(qs)
        self.H = hamiltonian
        rows = []
        for row in constraints:
            row = [chart.const(c) if not hasattr(c, "chart") else c for c in row]
            if len(row) != self.n:
                raise ValueError(f"constraint row has {len(row)} entries, expected {self.n}")
            for c in row:
                if any(c.depends_on(p) for p in ps):
                    raise ValueError("constraint coefficients must depend on q only")
            rows.append(row)
        if not rows or len(rows) >= self.n:
            raise ValueError("need between 1 and n-1 constraints")
        self.zeta = rows
        self.r = len(rows)
        self.k = self.n - self.r
        self.structure = AlmostSymplectic(Form.from_terms(chart, [(1, (p, q)) for q, p in zip(qs, ps)]))
        self.zeta_forms = [
            sum((Form.basis(chart, q) * c for q, c in zip(qs, row) if c), Form.zero(chart, 1))
            for row in rows
        ]
        dH = [hamiltonian.partial(p) for p in ps]
        self.fs = [sum((c * d for c, d in zip(row, dH)), chart.zero) for row in rows]
        self.Z = [
            Multivector._from_clean(chart, 1, {(chart.index(p),): c for p, c in zip(ps, row) if c})
            for row in rows
        ]
        hess = [[hamiltonian.partial(a).partial(b) for b in ps] for a in ps]
        self.C = [
            [
                sum((row_i[s] * hess[s][t] * row_j[t] for s in range(self.n) for t in range(self.n)), chart.zero)
                for row_j in rows
            ]
            for row_i in rows
        ]
        try:
            self.Cinv = inverse(self.C, chart)
        except SingularMatrixError:
            raise SingularMatrixError("the constraint matrix C is singular") from None
        L0 = self.structure.lambda0
        self.fbrackets = [[poisson_bracket(L0, a, b) for b in self.fs] for a in self.fs]

    def _quadratic(self):
        """``(1/2) C_ij {f^j, f^l}_0 C_lm`` as a matrix in ``(i, m)``."""
        r, B, Ci = self.r, self.fbrackets, self.Cinv
        zero = self.chart.zero
        return [
            [
                sum((Ci[i][j] * B[j][l] * Ci[l][m] for j in range(r) for l in range(r)), zero) * Fraction(1, 2)
                for m in range(r)
            ]
            for i in range(r)
        ]


def nonholonomic_bivector(data):
    """``Λ0 + C_lm X_{f^l}∧Z^m + ½ C_ij {f^j,f^l}_0 C_lm Z^i∧Z^m``."""
    s = data.structure
    X = [s.hamiltonian_vector(f) for f in data.fs]
    out = s.lambda0
    Q = data._quadratic()
    for l in range(data.r):
        for m in range(data.r):
            if data.Cinv[l][m]:
                out = out + wedge(X[l], data.Z[m]) * data.Cinv[l][m]
            if Q[l][m]:
                out = out + wedge(data.Z[l], data.Z[m]) * Q[l][m]
    return out


def nonholonomic_sigma(data):
    """``ω0 - C_lm df^l∧ζ^m + ½ C_ij {f^j,f^l}_0 C_lm ζ^i∧ζ^m``."""
    out = data.structure.omega0
    Q = data._quadratic()
    dfs = [differential(f) for f in data.fs]
    for l in range(data.r):
        for m in range(data.r):
            if data.Cinv[l][m]:
                out = out - wedge(dfs[l], data.zeta_forms[m]) * data.Cinv[l][m]
            if Q[l][m]:
                out = out + wedge(data.zeta_forms[l], data.zeta_forms[m]) * Q[l][m]
    return out


def nonholonomic_kernel_forms(data):
    """``[df^1, …, df^r, ζ^1, …, ζ^r]``."""
    return [differential(f) for f in data.fs] + list(data.zeta_forms)


def nonholonomic_bracket(data, h1, h2):
    """The four-term expansion of the nonholonomic bracket."""
    L0 = data.structure.lambda0
    r, Ci = data.r, data.Cinv
    zh1 = [apply_vector(Z, h1) for Z in data.Z]
    zh2 = [apply_vector(Z, h2) for Z in data.Z]
    fh1 = [poisson_bracket(L0, f, h1) for f in data.fs]
    fh2 = [poisson_bracket(L0, f, h2) for f in data.fs]
    total = poisson_bracket(L0, h1, h2)
    for l in range(r):
        for m in range(r):
            if Ci[l][m]:
                total = total + Ci[l][m] * (fh1[l] * zh2[m] - fh2[l] * zh1[m])
    for i in range(r):
        for m in range(r):
            acc = data.chart.zero
            for j in range(r):
                for l in range(r):
                    acc = acc + Ci[i][j] * data.fbrackets[j][l] * Ci[l][m]
            if acc:
                total = total + acc * zh1[i] * zh2[m]
    return total


def nonholonomic_factor(data):
    """``f = <df^1∧…∧ζ^1∧…, Λ0^{r}/r!>``."""
    forms = nonholonomic_kernel_forms(data)
    return pair(_wedge_all(data.chart, forms), wedge_power(data.structure.lambda0, data.r, True))


def nonholonomic_phi(data):
    return kernel_phi(data.structure, nonholonomic_kernel_forms(data), nonholonomic_sigma(data))
