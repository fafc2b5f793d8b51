"""Poisson brackets with prescribed Casimirs on even-dimensional charts.

Given an almost symplectic ``ω0`` on a ``2n``-chart, functions
``f1, …, f_{2n-2k}`` and a 2-form ``σ`` that kills their Hamiltonian
fields, the bivector ``Λ = Λ0^#(σ)`` has the ``f_i`` as Casimirs, and it is
Poisson exactly when ``2σ∧δσ = δ(σ∧σ)``. Its bracket is read off a
top-degree form:

    {h1, h2} Ω = -(1/f) dh1∧dh2∧(σ + g/(k-1) ω0)∧ω0^{k-2}/(k-2)!∧df1∧…

with ``f = <df1∧…, Λ0^{n-k}/(n-k)!>`` and ``g = i_{Λ0} σ``. For ``k = 1``
the factor ``g/(k-1)`` is singular; the bracket then takes the Jacobian
form ``{h1, h2} Ω = -(g/f) dh1∧dh2∧df1∧…``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exterior_calculus import (
    Form,
    Multivector,
    differential,
    interior_by_multivector,
    pair,
    wedge,
    wedge_power,
)
from .linalg import det, rank
from .scalar_field import ScalarField
from .symplectic_star import form_matrix
from .volume_duality import (
    SharpMap,
    bivector_matrix,
    jacobi_violations,
    poisson_bracket,
    psi_inverse,
)

__all__ = [
    "DegenerateCasimirsError",
    "ComplementaryConditionError",
    "EvenProblem",
    "PoissonCandidate",
    "casimir_factor",
    "casimir_factor_dual",
    "verify_casimir_section",
    "build_phi",
    "bracket",
    "build_poisson",
    "kernel_phi",
    "bracket_with_kernel",
    "jacobian_bracket",
    "jacobian_bivector",
    "bracket_table",
    "generic_rank",
]


class DegenerateCasimirsError(ValueError):
    """The Casimir factor vanishes identically."""


class ComplementaryConditionError(ValueError):
    """``σ`` fails ``2σ∧δσ = δ(σ∧σ)``."""


def _wedge_all(chart, forms):
    out = Form.scalar(chart.one)
    for a in forms:
        out = wedge(out, a)
    return out


def _half_corank(structure, count):
    if count % 2:
        raise ValueError(f"an even chart needs an even number of Casimirs, got {count}")
    return count // 2


def _top_ratio(volume, top):
    if top.grade != volume.chart.dim:
        raise ValueError("expected a top-degree form")
    return volume.top_ratio(top)


def casimir_factor(structure, casimirs):
    """``f = <df1∧…∧df_{2n-2k}, Λ0^{n-k}/(n-k)!>``."""
    return _factor_from_forms(structure, [differential(c) for c in casimirs])


def _factor_from_forms(structure, alphas):
    r = _half_corank(structure, len(alphas))
    value = pair(
        _wedge_all(structure.chart, alphas),
        wedge_power(structure.lambda0, r, divide_factorial=True),
    )
    if not value:
        raise DegenerateCasimirsError("Casimir set degenerate w.r.t. ω0 everywhere (f = 0)")
    return value


def casimir_factor_dual(structure, casimirs):
    """The same factor as ``<ω0^{n-k}/(n-k)!, X_f1∧…∧X_f_{2n-2k}>``."""
    r = _half_corank(structure, len(casimirs))
    fields = Multivector.scalar(structure.chart.one)
    for c in casimirs:
        fields = wedge(fields, structure.hamiltonian_vector(c))
    return pair(wedge_power(structure.omega0, r, divide_factorial=True), fields)


def generic_rank(tensor):
    """Rank over the fraction field of a 2-form or a bivector."""
    if tensor.grade != 2:
        raise ValueError("generic_rank needs grade 2")
    M = form_matrix(tensor) if isinstance(tensor, Form) else bivector_matrix(tensor)
    return rank(M)


class EvenProblem:
    """Data for the even-dimensional construction.

    Parameters
    ----------
    structure : AlmostSymplectic
    casimirs : sequence of ScalarField
        ``f1, …, f_{2n-2k}``; ``k`` is inferred from their number.
    sigma : Form
        The 2-form with ``Λ = Λ0^#(σ)``.
    """

    def __init__(self, structure, casimirs, sigma, name=None):
        self.structure = structure
        self.chart = structure.chart
        self.casimirs = tuple(casimirs)
        self.k = structure.n - _half_corank(structure, len(self.casimirs))
        if self.k < 1:
            raise ValueError("too many Casimirs: k must be at least 1")
        if sigma.grade != 2:
            raise ValueError("sigma must be a 2-form")
        self.sigma = sigma
        self.name = name
        self.f = casimir_factor(structure, self.casimirs)
        self.g = interior_by_multivector(structure.lambda0, sigma).coefficient()
        self.hamiltonian_fields = tuple(structure.hamiltonian_vector(c) for c in self.casimirs)
        self.dfs = tuple(differential(c) for c in self.casimirs)

    def __repr__(self):
        return f"EvenProblem(dim={self.chart.dim}, k={self.k}, name={self.name!r})"

    def bivector(self):
        """``Λ0^#(σ)``."""
        return self.structure.sharp(self.sigma)

    def casimir_gram_det(self):
        """``det({f_i, f_j}_0)``, which equals ``f²``."""
        L0 = self.structure.lambda0
        M = [[poisson_bracket(L0, a, b) for b in self.casimirs] for a in self.casimirs]
        return det(M, self.chart)


@dataclass
class SectionReport:
    annihilates: dict
    rank: int
    expected_rank: int

    @property
    def failures(self):
        out = [f"σ(X_f{i + 1}, ·) ≠ 0" for i, ok in sorted(self.annihilates.items()) if not ok]
        if self.rank != self.expected_rank:
            out.append(f"rank σ = {self.rank}, expected {self.expected_rank}")
        return out

    @property
    def passed(self):
        return not self.failures


def verify_casimir_section(problem):
    """Check ``σ(X_fi, ·) = 0`` for every Casimir and ``rank σ = 2k``."""
    annihilates = {
        i: interior_by_multivector(X, problem.sigma).is_zero()
        for i, X in enumerate(problem.hamiltonian_fields)
    }
    return SectionReport(annihilates, generic_rank(problem.sigma), 2 * problem.k)


def _phi(structure, alphas, sigma, f, g, k):
    if k < 2:
        raise ValueError("k < 2: use jacobian_bracket for the k = 1 reduction")
    chart = structure.chart
    inner = sigma + structure.omega0 * (g * Fraction(1, k - 1))
    out = wedge(inner, wedge_power(structure.omega0, k - 2, divide_factorial=True))
    out = wedge(out, _wedge_all(chart, alphas))
    return out * (-f.inverse())


def build_phi(problem):
    """``Φ = -(1/f)(σ + g/(k-1) ω0)∧ω0^{k-2}/(k-2)!∧df1∧…``, with ``Ψ⁻¹(Φ) = Λ0^#(σ)``."""
    return _phi(problem.structure, problem.dfs, problem.sigma, problem.f, problem.g, problem.k)


def _bracket_from_phi(volume, phi, h1, h2):
    top = wedge(differential(h1), differential(h2), phi)
    return _top_ratio(volume, top)


def bracket(problem, h1, h2):
    """``{h1, h2}``; dispatches to the Jacobian form when ``k = 1``."""
    if problem.k == 1:
        return jacobian_bracket(
            problem.structure.volume, problem.casimirs, -problem.g / problem.f, h1, h2
        )
    return _bracket_from_phi(problem.structure.volume, build_phi(problem), h1, h2)


def jacobian_bracket(volume, casimirs, coefficient, h1, h2):
    """``{h1, h2} Ω = c dh1∧dh2∧df1∧…∧df_{m-2}``."""
    chart = volume.chart
    if chart.dim < 3 and casimirs:
        raise ValueError("jacobian brackets need dimension at least 3")
    if len(casimirs) != chart.dim - 2:
        raise ValueError(f"need {chart.dim - 2} functions, got {len(casimirs)}")
    top = wedge(differential(h1), differential(h2), *[differential(c) for c in casimirs])
    return _top_ratio(volume, top) * coefficient


def _bivector_from_bracket(chart, fn):
    coords = chart.coord_functions()
    terms = {}
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            v = fn(coords[i], coords[j])
            if v:
                terms[(i, j)] = v
    return Multivector._from_clean(chart, 2, terms)


def jacobian_bivector(volume, casimirs, coefficient):
    """The bivector of :func:`jacobian_bracket`."""
    return _bivector_from_bracket(
        volume.chart, lambda a, b: jacobian_bracket(volume, casimirs, coefficient, a, b)
    )


def bracket_table(bivector):
    """``[(x_i, x_j, {x_i, x_j}), …]`` for ``i < j`` with a nonzero bracket."""
    names = bivector.chart.coords
    return [(names[i], names[j], c) for (i, j), c in sorted(bivector.terms.items())]


@dataclass
class PoissonCandidate:
    """A bivector with its defining data and verification results."""

    bivector: Multivector
    casimirs: tuple
    k: int
    sigma: Form = None
    tau: Form = None
    f: ScalarField = None
    g: ScalarField = None
    rank: int = None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failures(self):
        return [name for name, ok in self.checks.items() if not ok]

    def table(self):
        return bracket_table(self.bivector)


def _casimir_checks(bivector, casimirs):
    sharp = SharpMap(bivector)
    return {
        f"casimir f{i + 1}": sharp(differential(c)).is_zero() for i, c in enumerate(casimirs)
    }


def build_poisson(problem, verify=True):
    """Assemble ``Λ = Λ0^#(σ)`` and its verification bundle.

    Raises :class:`ComplementaryConditionError` when ``σ`` fails the
    complementary condition.
    """
    structure = problem.structure
    if not structure.check_complementary(problem.sigma):
        raise ComplementaryConditionError("σ does not satisfy 2σ∧δσ=δ(σ∧σ)")
    L = problem.bivector()
    r = generic_rank(L)
    cand = PoissonCandidate(
        bivector=L, casimirs=problem.casimirs, k=problem.k, sigma=problem.sigma,
        f=problem.f, g=problem.g, rank=r,
    )
    cand.checks["2σ∧δσ = δ(σ∧σ)"] = True
    cand.checks.update(_casimir_checks(L, problem.casimirs))
    cand.checks["rank <= 2k"] = r <= 2 * problem.k
    if r < 2 * problem.k:
        cand.notes.append(f"generic rank {r} < 2k = {2 * problem.k}: extra Casimirs exist")
    if problem.k >= 2:
        cand.checks["Ψ⁻¹(Φ) = Λ0^#(σ)"] = psi_inverse(structure.volume, build_phi(problem)) == L
    else:
        J = jacobian_bivector(structure.volume, problem.casimirs, -problem.g / problem.f)
        cand.checks["jacobian form = Λ0^#(σ)"] = J == L
    if verify:
        bad = jacobi_violations(L, first_only=True)
        cand.checks["jacobi"] = not bad
        if bad:
            names = structure.chart.coords
            cand.notes.append("first failing triple: " + ", ".join(names[i] for i in bad[0]))
    return cand


def kernel_phi(structure, alphas, sigma):
    """``Φ`` with the 1-forms ``α_i`` in place of the ``df_i``."""
    f = _factor_from_forms(structure, list(alphas))
    g = interior_by_multivector(structure.lambda0, sigma).coefficient()
    k = structure.n - len(alphas) // 2
    return _phi(structure, list(alphas), sigma, f, g, k)


def bracket_with_kernel(structure, alphas, sigma, h1, h2):
    """The almost Poisson bracket whose kernel is spanned by the ``α_i``."""
    return _bracket_from_phi(structure.volume, kernel_phi(structure, alphas, sigma), h1, h2)
