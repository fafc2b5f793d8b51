import random
import sys
from itertools import combinations
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from casimir_poisson import AlmostSymplectic, Chart, Form, Multivector, darboux_form  # noqa: E402

SAMPLES = 100


def darboux_chart(dim):
    n = dim // 2
    return Chart([f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)])


def darboux_structure(dim):
    chart = darboux_chart(dim)
    n = dim // 2
    return AlmostSymplectic(darboux_form(chart, [(f"x{i}", f"y{i}") for i in range(1, n + 1)]))


def random_scalar(chart, rng, rational=False):
    gens = chart.coord_functions()
    c = rng.choice(gens) * rng.randint(-3, 3) + rng.randint(-2, 2)
    if rng.random() < 0.5:
        c = c + rng.choice(gens) * rng.choice(gens)
    if rational and rng.random() < 0.3:
        c = c / (rng.choice(gens) ** 2 + 1)
    return c


def random_tensor(kind, chart, grade, rng, terms=3, rational=False):
    keys = list(combinations(range(chart.dim), grade))
    picked = rng.sample(keys, min(terms, len(keys)))
    return kind(chart, {k: random_scalar(chart, rng, rational) for k in picked}, grade=grade)


def random_form(chart, grade, rng, **kw):
    return random_tensor(Form, chart, grade, rng, **kw)


def random_multivector(chart, grade, rng, **kw):
    return random_tensor(Multivector, chart, grade, rng, **kw)


def random_symplectic(dim, rng):
    """Darboux plus a small nonconstant perturbation, kept nondegenerate."""
    from casimir_poisson import DegenerateFormError

    chart = darboux_chart(dim)
    n = dim // 2
    base = darboux_form(chart, [(f"x{i}", f"y{i}") for i in range(1, n + 1)])
    while True:
        pert = random_form(chart, 2, rng, terms=1)
        try:
            return AlmostSymplectic(base + pert)
        except DegenerateFormError:
            continue


@pytest.fixture(params=[4, 6], ids=["dim4", "dim6"])
def dim(request):
    return request.param


@pytest.fixture
def rng():
    return random.Random(20261017)


def even_problem(name):
    """The :class:`EvenProblem` behind a named even fixture."""
    from casimir_poisson import EvenProblem, fixture
    from casimir_poisson.runner import build_structure

    p = fixture(name).problem
    return EvenProblem(build_structure(p), p.lists["casimirs"], p.tensors["sigma"], name=p.name)


def odd_problem(name="gl3"):
    from casimir_poisson import OddProblem, fixture
    from casimir_poisson.runner import build_structure

    p = fixture(name).problem
    return OddProblem(build_structure(p), p.lists["casimirs"], p.tensors["sigma"], p.tensors.get("tau"), name=p.name)


def table_dict(chart, rows):
    """Oracle rows ``[[a, b, value], …]`` as ``{(a, b): ScalarField}``."""
    return {(a, b): chart.parse(v) for a, b, v in rows}
