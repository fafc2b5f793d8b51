import pytest

from casimir_poisson import (
    AlmostSymplectic,
    Chart,
    DiracData,
    NonholonomicData,
    darboux_form,
    differential,
    dirac_bivector,
    dirac_bracket,
    dirac_sigma,
    fixture,
    generic_rank,
    interior_by_multivector,
    is_poisson,
    jacobi_violations,
    nonholonomic_bivector,
    nonholonomic_bracket,
    nonholonomic_factor,
    nonholonomic_kernel_forms,
    nonholonomic_sigma,
    poisson_bracket,
)
from casimir_poisson.applications import nonholonomic_phi
from casimir_poisson.casimir_even import _bracket_from_phi
from casimir_poisson.linalg import SingularMatrixError, det
from casimir_poisson.volume_duality import SharpMap
from conftest import even_problem, table_dict
from oracles import load

ORACLE = load()


def _dirac(dim, constraints=None):
    n = dim // 2
    ch = Chart([f"q{i}" for i in range(1, n + 1)] + [f"p{i}" for i in range(1, n + 1)])
    S = AlmostSymplectic(darboux_form(ch, [(f"q{i}", f"p{i}") for i in range(1, n + 1)]))
    cs = [ch.parse(c) for c in (constraints or [f"q{n}", f"p{n}"])]
    return DiracData(S, cs)


def _assert_table(L, rows):
    ch = L.chart
    want = table_dict(ch, rows)
    got = {(ch.coords[i], ch.coords[j]): c for (i, j), c in L.terms.items()}
    assert got == want


@pytest.mark.parametrize(
    "dim, constraints, key",
    [(4, None, "dirac4"), (6, None, "dirac6"), (6, ["q3 + q1^2", "p3*(1 + q1^2) + p2"], "dirac6_curved")],
)
def test_dirac_against_oracle(dim, constraints, key):
    data = _dirac(dim, constraints)
    S = data.structure
    L = dirac_bivector(data)
    _assert_table(L, ORACLE[key]["table"])
    assert S.sharp(dirac_sigma(data)) == L
    xs = data.chart.coord_functions()
    for i in range(dim):
        for j in range(i + 1, dim):
            assert dirac_bracket(data, xs[i], xs[j]) == poisson_bracket(L, xs[i], xs[j])
    assert is_poisson(L) and S.check_complementary(dirac_sigma(data))
    assert data.f**2 == det(data.gram, data.chart)


@pytest.mark.parametrize("dim", [4, 6])
def test_dirac_g_and_codifferential(dim):
    data = _dirac(dim, ["q1 + p2^2", f"p1 + q{dim // 2}"] if dim == 6 else None)
    S = data.structure
    sigma = dirac_sigma(data)
    assert interior_by_multivector(S.lambda0, sigma).coefficient() == -data.k
    Xf = S.hamiltonian_vector(data.f)
    assert S.codifferential(sigma) == interior_by_multivector(Xf, sigma) * (-data.f.inverse())
    for c in data.constraints:
        assert SharpMap(dirac_bivector(data))(differential(c)).is_zero()


def test_dirac_rejects_first_class_constraints():
    with pytest.raises(SingularMatrixError):
        _dirac(4, ["q2", "q1"])
    with pytest.raises(ValueError):
        _dirac(4, ["q2"])


def _free_particle(row):
    ch = Chart(["q1", "q2", "q3", "p1", "p2", "p3"])
    H = ch.parse("(p1^2 + p2^2 + p3^2)/2")
    return NonholonomicData(ch, ["q1", "q2", "q3"], ["p1", "p2", "p3"], H, [[ch.parse(c) for c in row]])


@pytest.mark.parametrize("key, row", [("holonomic", ["0", "0", "1"]), ("nonholonomic", ["0", "-q1", "1"])])
def test_nonholonomic_against_oracle(key, row):
    data = _free_particle(row)
    ch = data.chart
    want = ORACLE[key]
    L = nonholonomic_bivector(data)
    _assert_table(L, want["table"])
    assert data.C[0][0] == ch.parse(want["C"])
    assert data.fs[0] == ch.parse(want["f_constraint"])
    sharp = SharpMap(L)
    assert all(sharp(a).is_zero() for a in nonholonomic_kernel_forms(data))
    bad = [tuple(ch.coords[i] for i in t) for t in jacobi_violations(L)]
    assert bad == [tuple(t) for t in want["jacobi_failures"]]
    assert data.structure.check_complementary(nonholonomic_sigma(data)) == (not bad)


@pytest.mark.parametrize("row", [["0", "0", "1"], ["0", "-q1", "1"], ["q2", "0", "1"]])
def test_nonholonomic_three_routes_agree(row):
    data = _free_particle(row)
    S = data.structure
    L = nonholonomic_bivector(data)
    assert S.sharp(nonholonomic_sigma(data)) == L
    phi = nonholonomic_phi(data)
    xs = data.chart.coord_functions()
    for i in range(6):
        for j in range(i + 1, 6):
            v = poisson_bracket(L, xs[i], xs[j])
            assert nonholonomic_bracket(data, xs[i], xs[j]) == v
            assert _bracket_from_phi(S.volume, phi, xs[i], xs[j]) == v
    assert interior_by_multivector(S.lambda0, nonholonomic_sigma(data)).coefficient() == -data.k


@pytest.mark.parametrize("row", [["0", "0", "1"], ["0", "-q1", "1"], ["q2", "0", "1"]])
def test_nonholonomic_factor_squares_to_det_C_squared(row):
    data = _free_particle(row)
    C = det(data.C, data.chart)
    assert nonholonomic_factor(data) ** 2 == C**2


def test_nonholonomic_validation():
    ch = Chart(["q1", "q2", "p1", "p2"])
    H = ch.parse("(p1^2 + p2^2)/2")
    with pytest.raises(ValueError):
        NonholonomicData(ch, ["q1", "q2"], ["p1", "p2"], H, [[ch.parse("p1"), ch.one]])
    with pytest.raises(ValueError):
        NonholonomicData(ch, ["q1", "q2"], ["p1", "p2"], H, [])
    with pytest.raises(SingularMatrixError):
        NonholonomicData(ch, ["q1", "q2"], ["p1", "p2"], ch.parse("p1*q2"), [[ch.zero, ch.one]])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_volterra_companion_splits(n):
    prob = even_problem(f"volterra_companion({n})")
    ch = prob.chart
    L = prob.bivector()
    _assert_table(L, ORACLE[f"volterra{n}"]["table"])
    assert prob.f == ch.parse(ORACLE[f"volterra{n}"]["f"])
    assert generic_rank(L) == ORACLE[f"volterra{n}"]["rank"]
    assert prob.g == 0
    # no bracket mixes the a and b blocks
    assert all((i < n) == (j < n) for i, j in L.terms)
    assert is_poisson(L)


def test_volterra_four_has_extra_casimirs():
    prob = even_problem("volterra_companion(4)")
    ch = prob.chart
    L = prob.bivector()
    assert generic_rank(L) == 4 < 2 * prob.k
    extra = ch.parse("b1 + b3")
    assert SharpMap(L)(differential(extra)).is_zero()


def test_fixture_expected_sections():
    fx = fixture("nonholonomic")
    assert fx.expected["jacobi"] is False
    assert fixture("holonomic").expected["jacobi"] is True
