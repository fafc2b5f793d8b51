"""Worked instances with their expected brackets attached.

Each fixture is a problem document (see :mod:`problem_file`) whose
``expected`` section holds ``f``, ``g`` and the nonzero bracket table.
Names accept the forms ``toda(3)``, ``toda 3``, ``toda:3`` and ``toda3``.

>>> fx = fixture("toda(3)")
>>> fx.expected["table"][("a1", "b1")]
ScalarField('a1')
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .exterior_calculus import Form, wedge
from .problem_file import FORMAT, Problem, parse_problem, tensor_terms
from .scalar_field import Chart

__all__ = ["FIXTURES", "Fixture", "fixture", "fixture_problem_dict", "parse_fixture_name"]


def _toda_chart(n):
    return Chart([f"a{i}" for i in range(1, n + 1)] + [f"b{i}" for i in range(1, n + 1)])


def _darboux_terms(pairs):
    return [["1", [a, b]] for a, b in pairs]


def _elementary(n):
    """``a1…a_{i-1}a_{i+1}…an`` summed over ``i`` as a string."""
    return " + ".join("*".join(f"a{j}" for j in range(1, n + 1) if j != i) for i in range(1, n + 1))


def _lattice_base(name, n):
    coords = _toda_chart(n).coords
    return {
        "format": FORMAT,
        "name": name,
        "mode": "construct",
        "dimension": 2 * n,
        "coordinates": list(coords),
        "structure": {"omega0": _darboux_terms((f"a{i}", f"b{i}") for i in range(1, n + 1))},
        "casimirs": [" + ".join(f"b{i}" for i in range(1, n + 1)), "*".join(f"a{i}" for i in range(1, n + 1))],
        "k": n - 1,
    }


def _table_rows(chart, entries):
    """Sum periodic contributions, orient ``i < j`` and drop zeros."""
    acc = {}
    for a, b, value in entries:
        if chart.index(a) > chart.index(b):
            a, b, value = b, a, -value
        acc[(a, b)] = acc.get((a, b), chart.zero) + value
    rows = [(a, b, v) for (a, b), v in acc.items() if v]
    rows.sort(key=lambda r: (chart.index(r[0]), chart.index(r[1])))
    return [[a, b, str(v)] for a, b, v in rows]


def toda(n=3):
    """The periodic Toda structure in Flaschka coordinates."""
    if n < 2:
        raise KeyError("toda needs n >= 2")
    chart = _toda_chart(n)
    a = chart.coord_functions()[:n]
    da = [Form.basis(chart, f"a{i}") for i in range(1, n + 1)]
    db = [Form.basis(chart, f"b{i}") for i in range(1, n + 1)]
    s = [da[j] - da[j + 1] for j in range(n - 1)]
    sp = [db[j] * a[j] - db[j + 1] * a[j + 1] for j in range(n - 1)]
    sigma = Form.zero(chart, 2)
    for j in range(n - 1):
        tail = Form.zero(chart, 1)
        for l in range(j, n - 1):
            tail = tail + sp[l]
        sigma = sigma + wedge(s[j], tail)
    table = []
    for i in range(n):
        nxt = (i + 1) % n
        table.append((f"a{i + 1}", f"b{i + 1}", a[i]))
        table.append((f"a{i + 1}", f"b{nxt + 1}", -a[i]))
    doc = _lattice_base(f"toda{n}", n)
    doc["sigma"] = tensor_terms(sigma)
    doc["expected"] = {
        "f": f"-({_elementary(n)})",
        "g": "-(" + " + ".join(f"a{i}" for i in range(1, n + 1)) + ")",
        "table": _table_rows(chart, table),
        "jacobi": True,
    }
    return doc


def volterra_companion(n=3):
    """``Σ da_j∧da_{j+1} + a_j a_{j+1} db_j∧db_{j+1}`` with periodic indices."""
    if n < 3:
        raise KeyError("volterra_companion needs n >= 3")
    chart = _toda_chart(n)
    a = chart.coord_functions()[:n]
    sigma = Form.zero(chart, 2)
    table = []
    for j in range(n):
        nxt = (j + 1) % n
        sigma = sigma + Form.basis(chart, f"a{j + 1}", f"a{nxt + 1}")
        sigma = sigma + Form.basis(chart, f"b{j + 1}", f"b{nxt + 1}") * (a[j] * a[nxt])
        table.append((f"a{j + 1}", f"a{nxt + 1}", a[j] * a[nxt]))
        table.append((f"b{j + 1}", f"b{nxt + 1}", chart.one))
    doc = _lattice_base(f"volterra_companion{n}", n)
    doc["sigma"] = tensor_terms(sigma)
    doc["expected"] = {
        "f": f"-({_elementary(n)})",
        "g": "0",
        "table": _table_rows(chart, table),
        "jacobi": True,
    }
    return doc


GL3_TABLE = [
    ["x1", "y1", "-y1"], ["x1", "y3", "y3"], ["x1", "z1", "-z1"], ["x1", "z2", "z2"],
    ["x2", "y1", "y1"], ["x2", "y2", "-y2"], ["x2", "z2", "-z2"], ["x2", "z3", "z3"],
    ["x3", "y2", "y2"], ["x3", "y3", "-y3"], ["x3", "z1", "z1"], ["x3", "z3", "-z3"],
    ["y1", "y2", "-z1"], ["y1", "y3", "z3"], ["y2", "y3", "-z2"],
]


def gl3():
    """A linear structure on 3×3 matrices with three prescribed Casimirs."""
    return {
        "format": FORMAT,
        "name": "gl3",
        "mode": "construct",
        "dimension": 9,
        "coordinates": ["x1", "x2", "x3", "y1", "y2", "y3", "z1", "z2", "z3"],
        "structure": {
            "theta0": [["1", ["z3"]]],
            "Theta0": _darboux_terms([("x1", "y1"), ("x2", "y2"), ("x3", "y3"), ("z1", "z2")]),
        },
        "casimirs": ["x1 + x2 + x3", "y1*z2 + y2*z3 + y3*z1", "z1*z2*z3"],
        "k": 3,
        "sigma": [
            ["-z1", ["x1", "x2"]], ["-z2", ["x2", "x3"]], ["z3", ["x1", "x3"]],
            ["-y1", ["x1", "y1"]], ["y1", ["x1", "y2"]], ["-y2", ["x2", "y2"]],
            ["y2", ["x2", "y3"]], ["-y3", ["x3", "y3"]], ["y3", ["x3", "y1"]],
            ["-z2", ["y1", "z1"]], ["-z1", ["y1", "z2"]], ["z2", ["y2", "z1"]],
            ["z1", ["y3", "z2"]],
        ],
        "tau": [["-z3", ["y2"]], ["z3", ["y3"]]],
        "expected": {
            "f": "z1^2*z2 + z1*z2^2 + z1*z2*z3",
            "g": "y1 + y2 + y3",
            "table": GL3_TABLE,
            "jacobi": True,
        },
    }


def r3_jacobian(f="x^2 + y^2 + z^2"):
    """``{h1, h2} dx∧dy∧dz = dh1∧dh2∧df`` on R^3."""
    chart = Chart(["x", "y", "z"])
    F = chart.parse(f)
    table = [("x", "y", F.partial("z")), ("x", "z", -F.partial("y")), ("y", "z", F.partial("x"))]
    return {
        "format": FORMAT,
        "name": "r3_jacobian",
        "mode": "jacobian",
        "dimension": 3,
        "coordinates": ["x", "y", "z"],
        "casimirs": [str(F)],
        "coefficient": "1",
        "expected": {"table": _table_rows(chart, table), "jacobi": True},
    }


def dirac(dim=4):
    """Darboux ``R^4`` or ``R^6`` with the constraints ``(q_n, p_n)``."""
    if dim not in (4, 6):
        raise KeyError("dirac fixtures exist for dimension 4 and 6")
    n = dim // 2
    qs = [f"q{i}" for i in range(1, n + 1)]
    ps = [f"p{i}" for i in range(1, n + 1)]
    table = [[q, p, "1"] for q, p in zip(qs[:-1], ps[:-1])]
    return {
        "format": FORMAT,
        "name": f"dirac{dim}",
        "mode": "dirac",
        "dimension": dim,
        "coordinates": qs + ps,
        "structure": {"omega0": _darboux_terms(zip(qs, ps))},
        "constraints": [qs[-1], ps[-1]],
        "expected": {"f": "1", "g": str(-(n - 1)), "table": table, "jacobi": True},
    }


def _free_particle(name, rows, jacobi):
    return {
        "format": FORMAT,
        "name": name,
        "mode": "nonholonomic",
        "dimension": 6,
        "coordinates": ["q1", "q2", "q3", "p1", "p2", "p3"],
        "positions": ["q1", "q2", "q3"],
        "momenta": ["p1", "p2", "p3"],
        "hamiltonian": "(p1^2 + p2^2 + p3^2)/2",
        "constraint_rows": rows,
        "expected": {"jacobi": jacobi},
    }


def holonomic():
    """A free particle in R^3 with ``ζ = dq3``."""
    return _free_particle("holonomic", [["0", "0", "1"]], True)


def nonholonomic():
    """A free particle in R^3 with ``ζ = dq3 - q1 dq2``."""
    return _free_particle("nonholonomic", [["0", "-q1", "1"]], False)


FIXTURES = {
    "toda": toda,
    "volterra_companion": volterra_companion,
    "gl3": gl3,
    "r3_jacobian": r3_jacobian,
    "dirac": dirac,
    "holonomic": holonomic,
    "nonholonomic": nonholonomic,
}

_CALL = re.compile(r"^([a-z_0-9]+)\s*\((.*)\)$")
_SUFFIX = re.compile(r"^([a-z_]+?)(\d+)$")


def parse_fixture_name(name):
    """``"toda(3)"`` -> ``("toda", "3")``; the argument may be absent."""
    name = name.strip()
    if name in FIXTURES:
        return name, None
    m = _CALL.match(name)
    if m:
        base, arg = m.group(1), m.group(2).strip()
    elif ":" in name or " " in name:
        base, arg = re.split(r"\s*:\s*|\s+", name, maxsplit=1)
    else:
        m = _SUFFIX.match(name)
        base, arg = (m.group(1), m.group(2)) if m else (name, None)
    if base not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(available())}")
    return base, (arg or None)


def available():
    return [
        "toda(n)", "volterra_companion(n)", "gl3", "r3_jacobian(f)",
        "dirac(4)", "dirac(6)", "holonomic", "nonholonomic",
    ]


def fixture_problem_dict(name):
    """The problem document of a fixture; raises ``KeyError`` if unknown."""
    base, arg = parse_fixture_name(name)
    fn = FIXTURES[base]
    if arg is None:
        return fn()
    if base in ("toda", "volterra_companion", "dirac"):
        if not arg.isdigit():
            raise KeyError(f"fixture {base} needs an integer argument, got {arg!r}")
        return fn(int(arg))
    if base == "r3_jacobian":
        return fn(arg)
    raise KeyError(f"fixture {base} takes no argument")


@dataclass(frozen=True)
class Fixture:
    name: str
    data: dict
    problem: Problem

    @property
    def expected(self):
        return self.problem.expected

    @property
    def chart(self):
        return self.problem.chart


def fixture(name):
    """A parsed fixture bundle; ``fixture("toda(3)").problem`` is ready to run."""
    data = fixture_problem_dict(name)
    return Fixture(data["name"], data, parse_problem(data))
