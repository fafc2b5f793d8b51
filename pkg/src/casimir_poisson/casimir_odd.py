"""Poisson brackets with prescribed Casimirs on odd-dimensional charts.

An almost cosymplectic pair ``(ϑ0, Θ0)`` on a ``(2n+1)``-chart determines
a Jacobi pair ``(Λ0, E0)``. A bivector with Casimirs ``f1, …,
f_{2n+1-2k}`` is written ``Λ = Λ0^#(σ) + Λ0^#(τ)∧E0`` with ``σ`` and
``τ`` semi-basic, and its bracket is

    {h1, h2} Ω = -(1/f) dh1∧dh2∧(σ + g/(k-1) Θ0)∧Θ0^{k-2}/(k-2)!∧df1∧…

where ``Ω = ϑ0∧Θ0^n/n!``, ``f = <df1∧…, E0∧Λ0^{n-k}/(n-k)!>`` and
``g = i_{Λ0} σ``.

The suspension ``M × R`` with coordinate ``s`` turns an odd problem into
an even one: ``ω0' = Θ0 + ds∧ϑ0``, ``σ' = σ + τ∧ds`` and ``s`` joins the
Casimirs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .casimir_even import (
    DegenerateCasimirsError,
    EvenProblem,
    PoissonCandidate,
    _casimir_checks,
    generic_rank,
    jacobian_bivector,
    jacobian_bracket,
)
from .exterior_calculus import (
    Form,
    Multivector,
    apply_vector,
    differential,
    exterior_derivative,
    interior_by_form,
    interior_by_multivector,
    pair,
    wedge,
    wedge_power,
)
from .linalg import SingularMatrixError, solve
from .scalar_field import ChartMismatchError
from .symplectic_star import AlmostSymplectic, form_matrix
from .volume_duality import SharpMap, VolumeStructure, jacobi_violations

__all__ = [
    "AlmostCosymplectic",
    "OddProblem",
    "NotSemiBasicError",
    "jacobi_pair",
    "casimir_factor_odd",
    "check_sigma_tau",
    "sigma_tau_equations",
    "sigma_tau_system",
    "bracket_odd",
    "suspend",
    "build_poisson_odd",
    "decompose_bivector",
    "RANK_PAIRS",
]

RANK_PAIRS = ("(2k,0)", "(2k,1)", "(2k-2,1)")


class NotSemiBasicError(ValueError):
    """A semi-basic operator received a form with ``i_{E0} φ ≠ 0``."""


def _sign(p):
    return -1 if (p * (p - 1) // 2) % 2 else 1


def jacobi_pair(theta0, Theta0):
    """Solve for ``(Λ0, E0)``.

    ``E0`` is fixed by ``i_{E0} ϑ0 = 1`` and ``i_{E0} Θ0 = 0``; each column
    ``X = Λ0^#(dx_i)`` by ``<ϑ0, X> = 0`` and ``i_X Θ0 = -(dx_i - <dx_i, E0> ϑ0)``.
    """
    chart = theta0.chart
    if Theta0.chart != chart:
        raise ChartMismatchError(f"{Theta0.chart!r} vs {chart!r}")
    m = chart.dim
    if m % 2 == 0:
        raise ValueError(f"almost cosymplectic structures need an odd dimension, got {m}")
    W = form_matrix(Theta0)
    th = [theta0[(a,)] for a in range(m)]
    # row b of i_X Θ0 is Σ_a X^a W_ab
    rows = [[W[a][b] for a in range(m)] for b in range(m)] + [th]
    try:
        E = solve(rows, [chart.zero] * m + [chart.one], chart)
    except (SingularMatrixError, ValueError):
        raise ValueError("no E0 with i(E0)ϑ0 = 1 and i(E0)Θ0 = 0") from None
    L = []
    for i in range(m):
        rhs = [-((chart.one if i == b else chart.zero) - E[i] * th[b]) for b in range(m)]
        try:
            L.append(solve(rows, rhs + [chart.zero], chart))
        except (SingularMatrixError, ValueError):
            raise ValueError(
                f"no Λ0^#(d{chart.coords[i]}) with i(Λ0^#ζ)Θ0 = -(ζ - <ζ,E0>ϑ0)"
            ) from None
    terms = {}
    for i in range(m):
        for j in range(m):
            if L[i][j] != -L[j][i]:
                raise ValueError("the solved Λ0 is not antisymmetric")
            if i < j and L[i][j]:
                terms[(i, j)] = L[i][j]
    lambda0 = Multivector._from_clean(chart, 2, terms)
    E0 = Multivector._from_clean(chart, 1, {(a,): c for a, c in enumerate(E) if c})
    return lambda0, E0


class AlmostCosymplectic:
    """An almost cosymplectic pair ``(ϑ0, Θ0)`` with its Jacobi pair.

    Parameters
    ----------
    theta0 : Form
        A 1-form.
    Theta0 : Form
        A 2-form with ``ϑ0∧Θ0^n ≠ 0``.
    """

    def __init__(self, theta0, Theta0):
        if theta0.grade != 1 or Theta0.grade != 2:
            raise ValueError("need a 1-form and a 2-form")
        chart = theta0.chart
        if chart.dim % 2 == 0:
            raise ValueError(f"almost cosymplectic structures need an odd dimension, got {chart.dim}")
        self.chart = chart
        self.n = (chart.dim - 1) // 2
        self.theta0 = theta0
        self.Theta0 = Theta0
        self.Theta_n = wedge_power(Theta0, self.n, divide_factorial=True)
        top = wedge(theta0, self.Theta_n)
        if top.is_zero():
            raise ValueError("ϑ0∧Θ0^n vanishes identically")
        self.lambda0, self.E0 = jacobi_pair(theta0, Theta0)
        self.volume = VolumeStructure(top)
        self.Omega = top
        self.OmegaDual = self.volume.OmegaDual
        self._sharp = SharpMap(self.lambda0)
        m = chart.dim
        W = form_matrix(Theta0)
        self._flat_images = {(): Form.scalar(chart.one)}
        for i in range(m):
            self._flat_images[(i,)] = Form._from_clean(
                chart, 1, {(j,): -W[i][j] for j in range(m) if W[i][j]}
            )

    def __repr__(self):
        return f"AlmostCosymplectic({self.theta0}; {self.Theta0})"

    def identities(self):
        """The four defining identities of ``(Λ0, E0)``, evaluated."""
        chart = self.chart
        out = {
            "i(E0)ϑ0 = 1": interior_by_multivector(self.E0, self.theta0).coefficient() == 1,
            "i(E0)Θ0 = 0": interior_by_multivector(self.E0, self.Theta0).is_zero(),
            "Λ0^#(ϑ0) = 0": self.sharp(self.theta0).is_zero(),
        }
        ok = True
        for name in chart.coords:
            zeta = Form.basis(chart, name)
            lhs = interior_by_multivector(self.sharp(zeta), self.Theta0)
            rhs = -(zeta - self.theta0 * pair(zeta, self.E0))
            ok = ok and lhs == rhs
        out["i(Λ0^#ζ)Θ0 = -(ζ - <ζ,E0>ϑ0)"] = ok
        return out

    def sharp(self, zeta):
        return self._sharp(zeta)

    def hamiltonian_vector(self, h):
        return self.sharp(differential(h))

    def _flat_basis(self, key):
        hit = self._flat_images.get(key)
        if hit is None:
            hit = wedge(self._flat_images[key[:1]], self._flat_basis(key[1:]))
            self._flat_images[key] = hit
        return hit

    def sharp_inverse(self, P):
        """The semi-basic form mapped to a horizontal multivector ``P``."""
        if interior_by_form(self.theta0, P):
            raise ValueError("sharp_inverse needs a horizontal multivector")
        total = Form.zero(self.chart, P.grade)
        for key, coeff in P.terms.items():
            total = total + self._flat_basis(key) * coeff
        return total

    # -- semi-basic calculus ---------------------------------------------

    def is_semibasic(self, phi):
        return phi.grade == 0 or interior_by_multivector(self.E0, phi).is_zero()

    def _require_sb(self, phi):
        if not self.is_semibasic(phi):
            raise NotSemiBasicError(f"not semi-basic: i(E0) of {phi} is nonzero")

    def star_sb(self, phi):
        """``∗φ = (-1)^{p(p-1)/2} i_{Λ0^#(φ)} Θ0^n/n!`` on semi-basic forms."""
        self._require_sb(phi)
        out = interior_by_multivector(self.sharp(phi), self.Theta_n)
        return out if _sign(phi.grade) > 0 else -out

    def d_sb(self, phi):
        """``dφ - ϑ0∧i_{E0}(dφ)``."""
        self._require_sb(phi)
        d = exterior_derivative(phi)
        return d - wedge(self.theta0, interior_by_multivector(self.E0, d))

    def delta_sb(self, phi):
        """``∗ d_sb ∗``."""
        if phi.grade == 0:
            return Form.zero(self.chart, 0)
        return self.star_sb(self.d_sb(self.star_sb(phi)))

    def suspension(self, name="s"):
        """``ω0' = Θ0 + ds∧ϑ0`` on the chart extended by ``name``."""
        chart = self.chart.extend(name)
        ds = Form.basis(chart, name)
        omega = self.Theta0.lift(chart) + wedge(ds, self.theta0.lift(chart))
        return AlmostSymplectic(omega)


def casimir_factor_odd(structure, casimirs):
    """``f = <df1∧…∧df_{2n+1-2k}, E0∧Λ0^{n-k}/(n-k)!>``."""
    r = len(casimirs)
    if r % 2 == 0:
        raise ValueError(f"an odd chart needs an odd number of Casimirs, got {r}")
    chart = structure.chart
    dfs = Form.scalar(chart.one)
    for c in casimirs:
        dfs = wedge(dfs, differential(c))
    value = pair(dfs, wedge(structure.E0, wedge_power(structure.lambda0, (r - 1) // 2, True)))
    if not value:
        raise DegenerateCasimirsError("Casimir set degenerate w.r.t. (ϑ0, Θ0) everywhere (f = 0)")
    return value


class OddProblem:
    """Data for the odd-dimensional construction.

    Parameters
    ----------
    structure : AlmostCosymplectic
    casimirs : sequence of ScalarField
        ``f1, …, f_{2n+1-2k}``; ``k`` is inferred.
    sigma, tau : Form
        Semi-basic 2-form and 1-form.
    """

    def __init__(self, structure, casimirs, sigma, tau=None, name=None):
        self.structure = structure
        self.chart = structure.chart
        self.casimirs = tuple(casimirs)
        self.k = structure.n - (len(self.casimirs) - 1) // 2
        if self.k < 1:
            raise ValueError("too many Casimirs: k must be at least 1")
        self.sigma = sigma
        self.tau = tau if tau is not None else Form.zero(self.chart, 1)
        if self.sigma.grade != 2 or self.tau.grade != 1:
            raise ValueError("sigma must be a 2-form and tau a 1-form")
        self.name = name
        self.f = casimir_factor_odd(structure, self.casimirs)
        self.g = interior_by_multivector(structure.lambda0, sigma).coefficient()
        self.hamiltonian_fields = tuple(structure.hamiltonian_vector(c) for c in self.casimirs)

    def __repr__(self):
        return f"OddProblem(dim={self.chart.dim}, k={self.k}, name={self.name!r})"

    def bivector(self):
        """``Λ0^#(σ) + Λ0^#(τ)∧E0``."""
        s = self.structure
        return s.sharp(self.sigma) + wedge(s.sharp(self.tau), s.E0)


def decompose_bivector(structure, L):
    """The semi-basic pair ``(σ, τ)`` with ``L = Λ0^#(σ) + Λ0^#(τ)∧E0``."""
    Y = interior_by_form(structure.theta0, L)
    H = L - wedge(Y, structure.E0)
    return structure.sharp_inverse(H), structure.sharp_inverse(Y)


@dataclass
class SigmaTauReport:
    properties: dict
    ranks: tuple
    rank_pair: str
    complete: dict
    poisson: bool
    equations: dict = field(default_factory=dict)
    suspended: bool = None
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.properties.values()) and all(self.complete.values())

    @property
    def consistent(self):
        """The equations agree with the Jacobi oracle on the assembled bivector."""
        return self.passed == self.poisson


def _rank_pair(problem):
    rs, rt = generic_rank(problem.sigma), (0 if problem.tau.is_zero() else 1)
    k = problem.k
    label = {(2 * k, 0): RANK_PAIRS[0], (2 * k, 1): RANK_PAIRS[1], (2 * k - 2, 1): RANK_PAIRS[2]}
    return (rs, rt), label.get((rs, rt))


def sigma_tau_equations(structure, sigma, tau):
    """The two defects of the (σ, τ) system as usually stated.

    ``2σ∧δσ - δ(σ∧σ)`` and
    ``δ(σ∧τ) + δσ∧τ - σ∧δτ - (i_Vσ)σ + ½ i_V(σ∧σ)`` with ``V = Λ0^#(dϑ0)``.
    These drop the ``E0``-derivatives of ``σ`` and ``τ``; see
    :func:`sigma_tau_system`.
    """
    delta = structure.delta_sb
    ss = wedge(sigma, sigma)
    first = wedge(sigma, delta(sigma)) * 2 - delta(ss)
    lhs = delta(wedge(sigma, tau)) + wedge(delta(sigma), tau) - wedge(sigma, delta(tau))
    V = structure.sharp(exterior_derivative(structure.theta0))
    rhs = sigma * interior_by_multivector(V, sigma).coefficient() - interior_by_multivector(V, ss) * Fraction(1, 2)
    return first, lhs - rhs


def sigma_tau_system(structure, sigma, tau):
    """Defects of ``2σ'∧δ'σ' = δ'(σ'∧σ')`` split along ``ds``, in semi-basic terms.

    With ``ℓβ = i_{E0} dβ``, ``A = i_{E0} dϑ0``, ``B = dϑ0 - ϑ0∧A``,
    ``U = δσ - ∗(A∧∗σ) + ∗ℓ∗τ`` and ``W = ∗(B∧∗σ) - δτ``::

        2σ∧U - δ(σ∧σ) + ∗(A∧∗(σ∧σ)) - 2∗ℓ∗(σ∧τ) = 0
        2Wσ - 2τ∧U - ∗(B∧∗(σ∧σ)) + 2δ(σ∧τ) = 0

    When ``dϑ0 = 0`` and ``σ, τ`` are ``E0``-invariant this reduces to
    :func:`sigma_tau_equations`.
    """
    star, delta = structure.star_sb, structure.delta_sb
    E0, theta0 = structure.E0, structure.theta0

    def ell(beta):
        return interior_by_multivector(E0, exterior_derivative(beta))

    dth = exterior_derivative(theta0)
    A = interior_by_multivector(E0, dth)
    B = dth - wedge(theta0, A)
    ss, st = wedge(sigma, sigma), wedge(sigma, tau)
    U = delta(sigma) - star(wedge(A, star(sigma))) + star(ell(star(tau)))
    W = star(wedge(B, star(sigma))) - delta(tau)
    first = wedge(sigma, U) * 2 - delta(ss) + star(wedge(A, star(ss))) - star(ell(star(st))) * 2
    second = (
        sigma * (W.coefficient() * 2) - wedge(tau, U) * 2 - star(wedge(B, star(ss))) + delta(st) * 2
    )
    return first, second


def check_sigma_tau(problem, suspended=False):
    """Properties (i)-(iii), the rank pair and the compatibility equations.

    ``equations`` holds the system as usually stated and ``complete`` the
    full expansion of the suspended condition (:func:`sigma_tau_system`);
    ``passed`` uses the latter. The assembled bivector is checked
    independently with the coordinate Jacobi sum; ``suspended=True`` also
    evaluates ``2σ'∧δ'σ' = δ'(σ'∧σ')`` on ``M × R``.
    """
    s = problem.structure
    props = {
        "σ semi-basic": s.is_semibasic(problem.sigma),
        "τ semi-basic": s.is_semibasic(problem.tau),
    }
    for i, X in enumerate(problem.hamiltonian_fields):
        props[f"τ(X_f{i + 1}) = 0"] = not pair(problem.tau, X)
        E_fi = apply_vector(s.E0, problem.casimirs[i])
        defect = interior_by_multivector(X, problem.sigma) + problem.tau * E_fi
        props[f"σ(X_f{i + 1},·) + <df{i + 1},E0>τ = 0"] = defect.is_zero()
    ranks, label = _rank_pair(problem)
    equations, complete = {}, {}
    notes = []
    if props["σ semi-basic"] and props["τ semi-basic"]:
        first, second = sigma_tau_equations(s, problem.sigma, problem.tau)
        equations["2σ∧δσ = δ(σ∧σ)"] = first.is_zero()
        equations["δ(σ∧τ) + δσ∧τ - σ∧δτ = (i_Vσ)σ - ½ i_V(σ∧σ)"] = second.is_zero()
        first, second = sigma_tau_system(s, problem.sigma, problem.tau)
        complete["2σ∧U = δ(σ∧σ) - ∗(A∧∗σ²) + 2∗ℓ∗(σ∧τ)"] = first.is_zero()
        complete["2Wσ - 2τ∧U = ∗(B∧∗σ²) - 2δ(σ∧τ)"] = second.is_zero()
    else:
        complete["semi-basic inputs"] = False
    if label is None:
        notes.append(f"rank pair {ranks} is not one of {', '.join(RANK_PAIRS)}")
    if equations and all(complete.values()) != all(equations.values()):
        notes.append("the reduced equations disagree with the complete system")
    poisson = not jacobi_violations(problem.bivector(), True)
    report = SigmaTauReport(props, ranks, label, complete, poisson, equations=equations, notes=notes)
    if suspended:
        susp = suspend(problem)
        report.suspended = susp.structure.check_complementary(susp.sigma)
    return report


def suspend(problem, name="s"):
    """The even problem on ``M × R`` with ``σ' = σ + τ∧ds`` and Casimir ``s``."""
    omega = problem.structure.suspension(name)
    chart = omega.chart
    ds = Form.basis(chart, name)
    sigma = problem.sigma.lift(chart) + wedge(problem.tau.lift(chart), ds)
    casimirs = [c.lift(chart) for c in problem.casimirs] + [chart.coord(name)]
    return EvenProblem(omega, casimirs, sigma, name=(problem.name or "odd") + "×R")


def bracket_odd(problem, h1, h2):
    """``{h1, h2}``; the Jacobian form with ``-g/f`` when ``k = 1``."""
    s = problem.structure
    if problem.k == 1:
        return jacobian_bracket(s.volume, problem.casimirs, -problem.g / problem.f, h1, h2)
    k = problem.k
    inner = problem.sigma + s.Theta0 * (problem.g * Fraction(1, k - 1))
    phi = wedge(inner, wedge_power(s.Theta0, k - 2, True))
    for c in problem.casimirs:
        phi = wedge(phi, differential(c))
    top = wedge(differential(h1), differential(h2), phi)
    return s.volume.top_ratio(top) * (-problem.f.inverse())


def _bivector_from_bracket(problem):
    chart = problem.chart
    coords = chart.coord_functions()
    terms = {}
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            v = bracket_odd(problem, coords[i], coords[j])
            if v:
                terms[(i, j)] = v
    return Multivector._from_clean(chart, 2, terms)


def build_poisson_odd(problem, verify=True):
    """Assemble ``Λ = Λ0^#(σ) + Λ0^#(τ)∧E0`` with its verification bundle."""
    L = problem.bivector()
    report = check_sigma_tau(problem)
    r = generic_rank(L)
    cand = PoissonCandidate(
        bivector=L, casimirs=problem.casimirs, k=problem.k, sigma=problem.sigma,
        tau=problem.tau, f=problem.f, g=problem.g, rank=r,
    )
    cand.checks.update(report.properties)
    cand.checks.update(report.complete)
    cand.checks.update(_casimir_checks(L, problem.casimirs))
    cand.checks["rank <= 2k"] = r <= 2 * problem.k
    if problem.k >= 2:
        cand.checks["bracket formula = Λ"] = _bivector_from_bracket(problem) == L
    else:
        J = jacobian_bivector(problem.structure.volume, problem.casimirs, -problem.g / problem.f)
        cand.checks["jacobian form = Λ"] = J == L
    cand.notes.extend(report.notes)
    if report.rank_pair:
        cand.notes.append(f"rank pair {report.rank_pair}")
    if verify:
        cand.checks["jacobi"] = report.poisson
    return cand
