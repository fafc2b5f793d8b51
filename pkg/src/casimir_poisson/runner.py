"""Run a parsed problem: build its bracket table and verification bundle.

``construct`` evaluates the bracket formula of the problem's mode on every
coordinate pair and cross-checks it; ``verify`` only checks the bivector.
Check levels: ``fast`` runs the Casimir and rank checks, ``full`` adds the
Jacobi triples, the differential conditions and the route comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .applications import (
    DiracData,
    NonholonomicData,
    dirac_bivector,
    dirac_bracket,
    dirac_sigma,
    nonholonomic_bivector,
    nonholonomic_bracket,
    nonholonomic_factor,
    nonholonomic_kernel_forms,
    nonholonomic_sigma,
)
from .casimir_even import (
    EvenProblem,
    _bracket_from_phi,
    _casimir_checks,
    build_phi,
    generic_rank,
    jacobian_bracket,
    kernel_phi,
    verify_casimir_section,
)
from .exterior_calculus import Multivector, interior_by_multivector
from .casimir_odd import AlmostCosymplectic, OddProblem, bracket_odd, check_sigma_tau, decompose_bivector, sigma_tau_system, suspend
from .symplectic_star import AlmostSymplectic
from .volume_duality import SharpMap, VolumeStructure, jacobi_violations, psi_inverse

__all__ = ["Report", "CHECK_LEVELS", "run", "construct", "verify", "build_structure"]

CHECK_LEVELS = ("fast", "full")
COMPLEMENTARY = "2σ∧δσ = δ(σ∧σ)"


@dataclass
class Report:
    """A bracket table with metadata and named verification results.

    ``checks`` decide the exit status; ``info`` entries are reported but
    not counted.
    """

    name: str
    mode: str
    command: str
    coordinates: tuple
    k: int = None
    f: object = None
    g: object = None
    rank: int = None
    table: list = None
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failures(self):
        return [name for name, ok in self.checks.items() if not ok]

    def table_dict(self):
        return {(a, b): v for a, b, v in self.table or ()}

    def to_dict(self):
        out = {
            "name": self.name,
            "mode": self.mode,
            "command": self.command,
            "coordinates": list(self.coordinates),
            "k": self.k,
            "f": None if self.f is None else str(self.f),
            "g": None if self.g is None else str(self.g),
            "rank": self.rank,
            "checks": dict(self.checks),
            "info": dict(self.info),
            "notes": list(self.notes),
            "status": "pass" if self.passed else "fail",
        }
        if self.table is not None:
            out["table"] = [[a, b, str(v)] for a, b, v in self.table]
        return out


def build_structure(problem):
    if problem.structure_kind == "even":
        return AlmostSymplectic(problem.tensors["omega0"])
    if problem.structure_kind == "odd":
        return AlmostCosymplectic(problem.tensors["theta0"], problem.tensors["Theta0"])
    return None


def _table(chart, fn):
    """Nonzero ``{x_i, x_j}`` for ``i < j`` from a bracket function."""
    xs = chart.coord_functions()
    names = chart.coords
    rows = []
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            v = fn(xs[i], xs[j])
            if v:
                rows.append((names[i], names[j], v))
    return rows


def _bivector(chart, rows):
    return Multivector._from_clean(chart, 2, {(chart.index(a), chart.index(b)): v for a, b, v in rows})


def _rows(L):
    names = L.chart.coords
    return [(names[i], names[j], c) for (i, j), c in sorted(L.terms.items())]


def _jacobi(report, L, expected=True):
    bad = jacobi_violations(L, first_only=True)
    names = L.chart.coords
    if bad:
        report.notes.append("first failing triple: " + ", ".join(names[i] for i in bad[0]))
    if expected:
        report.checks["jacobi"] = not bad
    else:
        report.checks["jacobi fails (expected)"] = bool(bad)
    return not bad


def _expected(report, problem, table=True):
    exp = problem.expected
    for key in ("f", "g"):
        if key in exp and getattr(report, key) is not None:
            report.checks[f"expected {key}"] = getattr(report, key) == exp[key]
    if table and "table" in exp and report.table is not None:
        got = report.table_dict()
        want = exp["table"]
        ok = set(got) == set(want) and all(got[key] == want[key] for key in want)
        report.checks["expected table"] = ok
        if not ok:
            diff = sorted(set(got) ^ set(want)) + sorted(k for k in set(got) & set(want) if got[k] != want[k])
            report.notes.append("table differs at " + ", ".join(f"{{{a}, {b}}}" for a, b in diff[:5]))


def _rank(report, L, bound, exact=False):
    r = generic_rank(L)
    report.rank = r
    if bound is not None:
        if exact:
            report.checks[f"rank = {bound}"] = r == bound
        else:
            report.checks[f"rank <= {bound}"] = r <= bound
            if r < bound:
                report.notes.append(f"generic rank {r} < {bound}: extra Casimirs exist")


# -- construct ---------------------------------------------------------------


def _construct_even(problem, report, full):
    S = build_structure(problem)
    prob = EvenProblem(S, problem.lists["casimirs"], problem.tensors["sigma"], name=problem.name)
    report.k, report.f, report.g = prob.k, prob.f, prob.g
    if prob.k >= 2:
        phi = build_phi(prob)
        rows = _table(S.chart, lambda a, b: _bracket_from_phi(S.volume, phi, a, b))
    else:
        c = -prob.g / prob.f
        rows = _table(S.chart, lambda a, b: jacobian_bracket(S.volume, prob.casimirs, c, a, b))
    report.table = rows
    T = _bivector(S.chart, rows)
    report.checks.update(_casimir_checks(T, prob.casimirs))
    _rank(report, T, 2 * prob.k)
    if full:
        section = verify_casimir_section(prob)
        for i, ok in sorted(section.annihilates.items()):
            report.checks[f"σ(X_f{i + 1}, ·) = 0"] = ok
        comp = S.check_complementary(prob.sigma)
        report.checks[COMPLEMENTARY] = comp
        L = prob.bivector()
        report.checks["table = Λ0^#(σ)"] = T == L
        if prob.k >= 2:
            report.checks["Ψ⁻¹(Φ) = Λ0^#(σ)"] = psi_inverse(S.volume, phi) == L
        jac = _jacobi(report, T)
        report.checks[f"{COMPLEMENTARY} ⇔ jacobi"] = comp == jac


def _construct_odd(problem, report, full):
    S = build_structure(problem)
    prob = OddProblem(S, problem.lists["casimirs"], problem.tensors["sigma"], problem.tensors.get("tau"), name=problem.name)
    report.k, report.f, report.g = prob.k, prob.f, prob.g
    rows = _table(S.chart, lambda a, b: bracket_odd(prob, a, b))
    report.table = rows
    T = _bivector(S.chart, rows)
    report.checks.update(_casimir_checks(T, prob.casimirs))
    _rank(report, T, 2 * prob.k)
    if full:
        st = check_sigma_tau(prob)
        report.checks.update(st.properties)
        report.checks.update(st.complete)
        for name, ok in st.equations.items():
            report.info[f"reduced system: {name}"] = ok
        report.notes.extend(st.notes)
        report.notes.append(f"rank pair {st.ranks}" + (f" = {st.rank_pair}" if st.rank_pair else ""))
        report.checks["table = Λ0^#(σ) + Λ0^#(τ)∧E0"] = T == prob.bivector()
        ev = suspend(prob)
        if ev.k >= 2:
            ephi = build_phi(ev)
            lifted = [(a, b, v.lift(ev.chart)) for a, b, v in rows]
            xs = {name: ev.chart.coord(name) for name in S.chart.coords}
            same = all(
                _bracket_from_phi(ev.structure.volume, ephi, xs[a], xs[b]) == v for a, b, v in lifted
            )
            names = S.chart.coords
            zeros = all(
                not _bracket_from_phi(ev.structure.volume, ephi, xs[a], xs[b])
                for i, a in enumerate(names) for b in names[i + 1:]
                if (a, b) not in report.table_dict()
            )
            report.checks["suspension route"] = same and zeros
        jac = _jacobi(report, T)
        report.checks["(σ, τ) system ⇔ jacobi"] = st.passed == jac


def _construct_dirac(problem, report, full):
    S = build_structure(problem)
    data = DiracData(S, problem.lists["constraints"])
    report.k, report.f = data.k, data.f
    sigma = dirac_sigma(data)
    report.g = interior_by_multivector(S.lambda0, sigma).coefficient()
    rows = _table(S.chart, lambda a, b: dirac_bracket(data, a, b))
    report.table = rows
    T = _bivector(S.chart, rows)
    report.checks.update(_casimir_checks(T, data.constraints))
    _rank(report, T, 2 * data.k, exact=True)
    if full:
        report.checks["g = -k"] = report.g == S.chart.const(-data.k)
        Xf = S.hamiltonian_vector(data.f)
        report.checks["δσ = -(1/f) i_{X_f}σ"] = S.codifferential(sigma) == interior_by_multivector(Xf, sigma) * (-data.f.inverse())
        comp = S.check_complementary(sigma)
        report.checks[COMPLEMENTARY] = comp
        report.checks["table = Λ0 + Σ c_ij X_fi∧X_fj"] = T == dirac_bivector(data)
        jac = _jacobi(report, T)
        report.checks[f"{COMPLEMENTARY} ⇔ jacobi"] = comp == jac


def _nonholonomic_data(problem):
    return NonholonomicData(
        problem.chart,
        problem.lists["positions"],
        problem.lists["momenta"],
        problem.scalars["hamiltonian"],
        problem.lists["constraint_rows"],
    )


def _construct_nonholonomic(problem, report, full):
    data = _nonholonomic_data(problem)
    S = data.structure
    sigma = nonholonomic_sigma(data)
    report.k, report.f = data.k, nonholonomic_factor(data)
    report.g = interior_by_multivector(S.lambda0, sigma).coefficient()
    rows = _table(S.chart, lambda a, b: nonholonomic_bracket(data, a, b))
    report.table = rows
    T = _bivector(S.chart, rows)
    sharp = SharpMap(T)
    forms = nonholonomic_kernel_forms(data)
    for i in range(data.r):
        report.checks[f"Λ^#(df^{i + 1}) = 0"] = sharp(forms[i]).is_zero()
        report.checks[f"Λ^#(ζ^{i + 1}) = 0"] = sharp(forms[data.r + i]).is_zero()
    _rank(report, T, 2 * data.k)
    if full:
        report.checks["g = -k"] = report.g == S.chart.const(-data.k)
        phi = kernel_phi(S, forms, sigma)
        report.checks["table = kernel bracket"] = all(
            _bracket_from_phi(S.volume, phi, S.chart.coord(a), S.chart.coord(b)) == v for a, b, v in rows
        ) and _bivector(S.chart, _table(S.chart, lambda a, b: _bracket_from_phi(S.volume, phi, a, b))) == T
        report.checks["table = Λ_nh"] = T == nonholonomic_bivector(data)
        comp = S.check_complementary(sigma)
        report.info[COMPLEMENTARY] = comp
        jac = _jacobi(report, T, problem.expected.get("jacobi", True))
        report.checks[f"{COMPLEMENTARY} ⇔ jacobi"] = comp == jac


def _construct_kernel(problem, report, full):
    S = build_structure(problem)
    alphas = problem.lists["alphas"]
    sigma = problem.tensors["sigma"]
    phi = kernel_phi(S, alphas, sigma)
    report.g = interior_by_multivector(S.lambda0, sigma).coefficient()
    report.k = S.n - len(alphas) // 2
    rows = _table(S.chart, lambda a, b: _bracket_from_phi(S.volume, phi, a, b))
    report.table = rows
    T = _bivector(S.chart, rows)
    sharp = SharpMap(T)
    for i, a in enumerate(alphas):
        report.checks[f"Λ^#(α{i + 1}) = 0"] = sharp(a).is_zero()
    _rank(report, T, 2 * report.k)
    if full:
        comp = S.check_complementary(sigma)
        report.info[COMPLEMENTARY] = comp
        jac = _jacobi(report, T, problem.expected.get("jacobi", True)) if "jacobi" in problem.expected else None
        if jac is None:
            report.info["jacobi"] = not jacobi_violations(T, True)
        else:
            report.checks[f"{COMPLEMENTARY} ⇔ jacobi"] = comp == jac


def _construct_jacobian(problem, report, full):
    chart = problem.chart
    volume = VolumeStructure(problem.tensors["volume"]) if "volume" in problem.tensors else VolumeStructure.standard(chart)
    casimirs = problem.lists["casimirs"]
    coeff = problem.scalars.get("coefficient", chart.one)
    report.k = 1
    rows = _table(chart, lambda a, b: jacobian_bracket(volume, casimirs, coeff, a, b))
    report.table = rows
    T = _bivector(chart, rows)
    report.checks.update(_casimir_checks(T, casimirs))
    _rank(report, T, 2)
    if full:
        _jacobi(report, T)


_CONSTRUCT = {
    "dirac": _construct_dirac,
    "nonholonomic": _construct_nonholonomic,
    "kernel": _construct_kernel,
    "jacobian": _construct_jacobian,
}


def construct(problem, check_level="full"):
    """Evaluate the bracket formula and verify the resulting table."""
    report = Report(problem.name, problem.mode, "construct", problem.chart.coords)
    full = check_level == "full"
    if problem.mode == "construct":
        if "sigma" not in problem.tensors:
            raise ValueError("construct needs \"sigma\"; a bare \"bivector\" can only be verified")
        (_construct_odd if problem.structure_kind == "odd" else _construct_even)(problem, report, full)
    else:
        _CONSTRUCT[problem.mode](problem, report, full)
    _expected(report, problem)
    return report


# -- verify --------------------------------------------------------------------


def _candidate(problem):
    """``(bivector, casimirs, k, structure)`` for the verify command."""
    chart = problem.chart
    S = build_structure(problem)
    if problem.mode == "construct":
        casimirs = problem.lists["casimirs"]
        if "bivector" in problem.tensors:
            L = problem.tensors["bivector"]
        elif S is not None and problem.structure_kind == "odd":
            L = OddProblem(S, casimirs, problem.tensors["sigma"], problem.tensors.get("tau")).bivector()
        else:
            L = S.sharp(problem.tensors["sigma"])
        if problem.k is not None:
            k = problem.k
        elif S is not None:
            k = S.n - (len(casimirs) - (chart.dim % 2)) // 2
        else:
            k = None
        return L, casimirs, k, S
    if problem.mode == "dirac":
        data = DiracData(S, problem.lists["constraints"])
        return dirac_bivector(data), data.constraints, data.k, S
    if problem.mode == "nonholonomic":
        data = _nonholonomic_data(problem)
        return nonholonomic_bivector(data), (), data.k, data.structure
    if problem.mode == "kernel":
        alphas = problem.lists["alphas"]
        phi = kernel_phi(S, alphas, problem.tensors["sigma"])
        return psi_inverse(S.volume, phi), (), S.n - len(alphas) // 2, S
    volume = VolumeStructure(problem.tensors["volume"]) if "volume" in problem.tensors else VolumeStructure.standard(chart)
    casimirs = problem.lists["casimirs"]
    coeff = problem.scalars.get("coefficient", chart.one)
    rows = _table(chart, lambda a, b: jacobian_bracket(volume, casimirs, coeff, a, b))
    return _bivector(chart, rows), casimirs, 1, None


def verify(problem, check_level="full"):
    """Check the problem's bivector without building a bracket table."""
    report = Report(problem.name, problem.mode, "verify", problem.chart.coords)
    full = check_level == "full"
    L, casimirs, k, S = _candidate(problem)
    report.k = k
    report.checks.update(_casimir_checks(L, casimirs))
    _rank(report, L, None if k is None else 2 * k)
    if full:
        expected_jacobi = problem.expected.get("jacobi", True)
        jac = _jacobi(report, L, expected_jacobi)
        if isinstance(S, AlmostSymplectic):
            comp = S.check_complementary(S.sharp_inverse(L))
            key = COMPLEMENTARY
            (report.checks if expected_jacobi else report.info)[key] = comp
            report.checks[f"{key} ⇔ jacobi"] = comp == jac
        elif isinstance(S, AlmostCosymplectic):
            sigma, tau = decompose_bivector(S, L)
            first, second = sigma_tau_system(S, sigma, tau)
            report.checks["2σ∧U = δ(σ∧σ) - ∗(A∧∗σ²) + 2∗ℓ∗(σ∧τ)"] = first.is_zero()
            report.checks["2Wσ - 2τ∧U = ∗(B∧∗σ²) - 2δ(σ∧τ)"] = second.is_zero()
            report.checks["(σ, τ) system ⇔ jacobi"] = (first.is_zero() and second.is_zero()) == jac
    _expected(report, problem, table=False)
    return report


def run(problem, command="construct", check_level="full"):
    if check_level not in CHECK_LEVELS:
        raise ValueError(f"unknown check level {check_level!r}")
    return (construct if command == "construct" else verify)(problem, check_level)
