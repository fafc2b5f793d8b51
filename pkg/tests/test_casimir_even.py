import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_poisson import (
    ComplementaryConditionError,
    DegenerateCasimirsError,
    EvenProblem,
    Form,
    bracket,
    build_phi,
    build_poisson,
    casimir_factor,
    differential,
    generic_rank,
    is_poisson,
    jacobi_violations,
    poisson_bracket,
    verify_casimir_section,
    wedge,
)
from casimir_poisson.casimir_even import casimir_factor_dual, jacobian_bivector
from conftest import (
    SAMPLES,
    darboux_structure,
    even_problem,
    random_form,
    random_scalar,
    random_symplectic,
    table_dict,
)
from oracles import load

ORACLE = load()
DIMS = pytest.mark.parametrize("dim", [4, 6])
PROPERTY = settings(max_examples=SAMPLES, deadline=None, derandomize=True)


@pytest.mark.parametrize("n", [3, 4])
def test_toda_factors(n):
    prob = even_problem(f"toda({n})")
    ch = prob.chart
    assert prob.k == n - 1
    assert prob.f == ch.parse(ORACLE[f"toda{n}"]["f"])
    assert prob.g == -sum(ch.coord_functions()[:n], ch.zero)
    assert casimir_factor_dual(prob.structure, prob.casimirs) == prob.f
    assert prob.casimir_gram_det() == prob.f**2


@pytest.mark.parametrize("n", [3, 4])
def test_toda_bracket_matches_oracle(n):
    prob = even_problem(f"toda({n})")
    ch = prob.chart
    xs = dict(zip(ch.coords, ch.coord_functions()))
    want = table_dict(ch, ORACLE[f"toda{n}"]["table"])
    for i, a in enumerate(ch.coords):
        for b in ch.coords[i + 1:]:
            assert bracket(prob, xs[a], xs[b]) == want.get((a, b), ch.zero), (a, b)


def test_toda_star_of_phi_is_sigma():
    prob = even_problem("toda(3)")
    S = prob.structure
    assert S.sharp(S.star(build_phi(prob))) == prob.bivector()
    assert S.star(build_phi(prob)) == prob.sigma


def test_toda_candidate_bundle():
    cand = build_poisson(even_problem("toda(3)"))
    assert cand.passed, cand.failures
    assert cand.rank == 4
    assert len(cand.table()) == 6


def test_section_report():
    prob = even_problem("toda(3)")
    rep = verify_casimir_section(prob)
    assert rep.passed and rep.rank == 4


def test_extra_casimirs_reported():
    cand = build_poisson(even_problem("volterra_companion(4)"))
    assert cand.passed
    assert cand.rank == 4 and cand.k == 3
    assert any("extra Casimirs" in n for n in cand.notes)


def _k1_problem(dim, rng):
    """Two Casimirs on a 4-chart: σ taken from a Jacobian bivector."""
    S = darboux_structure(dim)
    ch = S.chart
    cs = [random_scalar(ch, rng) + ch.coord_functions()[i] for i in range(dim - 2)]
    L = jacobian_bivector(S.volume, cs, ch.one + ch.coord_functions()[0] ** 2)
    return EvenProblem(S, cs, S.sharp_inverse(L)), L


def test_k1_dispatches_to_jacobian_form(rng):
    prob, L = _k1_problem(4, rng)
    assert prob.k == 1
    xs = prob.chart.coord_functions()
    for i in range(4):
        for j in range(i + 1, 4):
            assert bracket(prob, xs[i], xs[j]) == poisson_bracket(L, xs[i], xs[j])
    cand = build_poisson(prob)
    assert cand.passed, cand.failures
    assert "jacobian form = Λ0^#(σ)" in cand.checks
    with pytest.raises(ValueError):
        build_phi(prob)


def test_complementary_failure_raises():
    prob = even_problem("toda(3)")
    ch = prob.chart
    bent = EvenProblem(prob.structure, prob.casimirs, prob.sigma * ch.parse("b1"))
    assert verify_casimir_section(bent).passed
    assert jacobi_violations(bent.bivector())
    with pytest.raises(ComplementaryConditionError):
        build_poisson(bent)


def test_degenerate_casimirs():
    S = darboux_structure(4)
    ch = S.chart
    with pytest.raises(DegenerateCasimirsError):
        casimir_factor(S, [ch.coord("x1"), ch.coord("x2")])
    with pytest.raises(ValueError):
        EvenProblem(S, [ch.coord("x1")], Form.zero(ch, 2))


@DIMS
@PROPERTY
@given(st.randoms(use_true_random=False))
def test_complementary_iff_poisson(dim, rnd):
    S = random_symplectic(dim, rnd) if rnd.random() < 0.5 else darboux_structure(dim)
    ch = S.chart
    F, G = random_scalar(ch, rnd), random_scalar(ch, rnd)
    kind = rnd.randint(0, 2)
    if kind == 0:
        sigma = wedge(differential(F), differential(G)) * random_scalar(ch, rnd)
    elif kind == 1:
        sigma = wedge(differential(F), differential(G)) * (F * G + 1)
    else:
        sigma = random_form(ch, 2, rnd, terms=2)
    assert S.check_complementary(sigma) == is_poisson(S.sharp(sigma))


@DIMS
@PROPERTY
@given(st.randoms(use_true_random=False))
def test_gram_determinant_is_f_squared(dim, rnd):
    S = random_symplectic(dim, rnd)
    ch = S.chart
    cs = [random_scalar(ch, rnd) for _ in range(2)]
    try:
        prob = EvenProblem(S, cs, Form.zero(ch, 2))
    except DegenerateCasimirsError:
        return
    assert prob.casimir_gram_det() == prob.f**2
    assert generic_rank(S.omega0) == dim
