"""Problem files: JSON documents describing a construction.

A minimal even problem::

    {
      "format": "casimir-poisson/1",
      "name": "toda3",
      "mode": "construct",
      "dimension": 6,
      "coordinates": ["a1", "a2", "a3", "b1", "b2", "b3"],
      "structure": {"omega0": [["1", ["a1", "b1"]], ...]},
      "casimirs": ["b1 + b2 + b3", "a1*a2*a3"],
      "k": 2,
      "sigma": [["a1", ["a1", "b1"]], ...]
    }

Tensors are lists of ``[coefficient, [coordinate, ...]]`` terms with the
coefficient written in the expression grammar of :meth:`Chart.parse`.
Odd problems give ``{"theta0": ..., "Theta0": ...}`` as the structure and
may add ``"tau"``. Other modes use ``constraints`` (``dirac``),
``hamiltonian``/``positions``/``momenta``/``constraint_rows``
(``nonholonomic``), ``alphas`` (``kernel``) or ``coefficient``
(``jacobian``). ``"mode": "fixture"`` with ``"fixture": "<name>"`` loads a
built-in fixture. An optional ``expected`` section holds ``f``, ``g``,
``table`` and ``jacobi`` for regression.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exterior_calculus import Form, Multivector
from .scalar_field import Chart, ExpressionSyntaxError

__all__ = ["FORMAT", "MODES", "ProblemFileError", "Problem", "load_problem", "parse_problem", "dump_problem", "tensor_terms"]

FORMAT = "casimir-poisson/1"
MODES = ("construct", "dirac", "nonholonomic", "kernel", "jacobian", "fixture")


class ProblemFileError(ValueError):
    """An input error, located by line and column when possible."""

    def __init__(self, message, line=None, column=None, source=None):
        loc = ""
        if line is not None:
            loc = f"line {line}, column {column}: "
        super().__init__(f"{source + ': ' if source else ''}{loc}{message}")
        self.line = line
        self.column = column


@dataclass
class Problem:
    """The parsed, validated content of a problem file."""

    raw: dict
    name: str
    mode: str
    chart: Chart
    structure_kind: str = None
    tensors: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    lists: dict = field(default_factory=dict)
    k: int = None
    expected: dict = field(default_factory=dict)

    def _key(self):
        return (self.name, self.mode, self.chart, self.structure_kind, self.tensors, self.scalars, self.lists, self.k, self.expected)

    def __eq__(self, other):
        return isinstance(other, Problem) and self._key() == other._key()


class _Locator:
    """Maps a position inside a JSON string value back to the file."""

    def __init__(self, text, source):
        self.text = text
        self.source = source

    def where(self, value, offset=0):
        if self.text is None:
            return None, None
        needle = json.dumps(value, ensure_ascii=False)
        pos = self.text.find(needle)
        if pos < 0:
            needle = json.dumps(value)
            pos = self.text.find(needle)
        if pos < 0:
            return None, None
        pos += 1 + offset
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, column

    def fail(self, message, value=None, offset=0):
        line, column = self.where(value, offset) if value is not None else (None, None)
        raise ProblemFileError(message, line, column, self.source)


def _expr(chart, text, where, loc):
    if not isinstance(text, str):
        text = str(text) if isinstance(text, int) else loc.fail(f"{where}: expected an expression string")
    try:
        return chart.parse(text)
    except ExpressionSyntaxError as exc:
        loc.fail(f"{where}: {exc.reason} in {text!r}", text, exc.column - 1)
    except KeyError as exc:
        loc.fail(f"{where}: {exc.args[0]}", text)


def _tensor(chart, terms, kind, where, loc, grade):
    if not isinstance(terms, list):
        loc.fail(f"{where}: expected a list of [coefficient, [coordinates]] terms")
    out = kind.zero(chart, grade)
    for n, term in enumerate(terms):
        if not (isinstance(term, list) and len(term) == 2 and isinstance(term[1], list)):
            loc.fail(f"{where}[{n}]: expected [coefficient, [coordinates]]")
        coeff = _expr(chart, term[0], f"{where}[{n}]", loc)
        names = term[1]
        for name in names:
            if name not in chart.coords:
                loc.fail(f"{where}[{n}]: unknown coordinate {name!r}", name)
        if len(names) != grade:
            loc.fail(f"{where}[{n}]: expected {grade} coordinates, got {len(names)}")
        out = out + kind(chart, {tuple(names): coeff}, grade=grade)
    return out


def parse_problem(data, text=None, source=None):
    """Validate a decoded JSON document and build a :class:`Problem`."""
    loc = _Locator(text, source)
    if not isinstance(data, dict):
        loc.fail("the top level must be an object")
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        loc.fail(f"unsupported format {fmt!r}", fmt)
    mode = data.get("mode", "construct")
    if mode not in MODES:
        loc.fail(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}", mode)
    if mode == "fixture":
        from .fixtures import fixture_problem_dict

        name = data.get("fixture")
        if not isinstance(name, str):
            loc.fail("mode 'fixture' needs a \"fixture\" name")
        try:
            return parse_problem(fixture_problem_dict(name))
        except KeyError as exc:
            loc.fail(exc.args[0], name)
    coords = data.get("coordinates")
    if not isinstance(coords, list) or not coords:
        loc.fail("\"coordinates\" must be a nonempty list of names")
    try:
        chart = Chart(coords)
    except ValueError as exc:
        loc.fail(str(exc))
    dim = data.get("dimension", chart.dim)
    if dim != chart.dim:
        loc.fail(f"dimension {dim} does not match {chart.dim} coordinates", dim)
    p = Problem(raw=data, name=str(data.get("name", "problem")), mode=mode, chart=chart)
    structure = data.get("structure")
    if structure is not None:
        if not isinstance(structure, dict):
            loc.fail("\"structure\" must be an object")
        if "omega0" in structure:
            if chart.dim % 2:
                loc.fail(f"omega0 needs an even dimension, got {chart.dim}", dim)
            p.structure_kind = "even"
            p.tensors["omega0"] = _tensor(chart, structure["omega0"], Form, "structure.omega0", loc, 2)
        elif "theta0" in structure and "Theta0" in structure:
            if chart.dim % 2 == 0:
                loc.fail(f"(theta0, Theta0) needs an odd dimension, got {chart.dim}", dim)
            p.structure_kind = "odd"
            p.tensors["theta0"] = _tensor(chart, structure["theta0"], Form, "structure.theta0", loc, 1)
            p.tensors["Theta0"] = _tensor(chart, structure["Theta0"], Form, "structure.Theta0", loc, 2)
        else:
            loc.fail("\"structure\" needs omega0, or theta0 and Theta0")
    for key, kind, grade in (("sigma", Form, 2), ("tau", Form, 1), ("bivector", Multivector, 2), ("volume", Form, chart.dim)):
        if key in data:
            p.tensors[key] = _tensor(chart, data[key], kind, key, loc, grade)
    if "alphas" in data:
        p.lists["alphas"] = [_tensor(chart, a, Form, f"alphas[{i}]", loc, 1) for i, a in enumerate(data["alphas"])]
    for key in ("casimirs", "constraints"):
        if key in data:
            if not isinstance(data[key], list):
                loc.fail(f"\"{key}\" must be a list of expressions")
            p.lists[key] = [_expr(chart, e, f"{key}[{i}]", loc) for i, e in enumerate(data[key])]
    for key in ("hamiltonian", "coefficient"):
        if key in data:
            p.scalars[key] = _expr(chart, data[key], key, loc)
    if "constraint_rows" in data:
        p.lists["constraint_rows"] = [
            [_expr(chart, e, f"constraint_rows[{i}][{j}]", loc) for j, e in enumerate(row)]
            for i, row in enumerate(data["constraint_rows"])
        ]
    for key in ("positions", "momenta"):
        if key in data:
            for name in data[key]:
                if name not in chart.coords:
                    loc.fail(f"{key}: unknown coordinate {name!r}", name)
            p.lists[key] = list(data[key])
    if "k" in data:
        if not isinstance(data["k"], int) or data["k"] < 1:
            loc.fail("\"k\" must be a positive integer", data["k"])
        p.k = data["k"]
    expected = data.get("expected", {})
    if expected:
        exp = {}
        for key in ("f", "g"):
            if key in expected:
                exp[key] = _expr(chart, expected[key], f"expected.{key}", loc)
        if "table" in expected:
            table = {}
            for n, row in enumerate(expected["table"]):
                if not (isinstance(row, list) and len(row) == 3):
                    loc.fail(f"expected.table[{n}]: expected [coordinate, coordinate, expression]")
                a, b, e = row
                for name in (a, b):
                    if name not in chart.coords:
                        loc.fail(f"expected.table[{n}]: unknown coordinate {name!r}", name)
                value = _expr(chart, e, f"expected.table[{n}]", loc)
                if chart.index(a) > chart.index(b):
                    a, b, value = b, a, -value
                table[(a, b)] = value
            exp["table"] = table
        if "jacobi" in expected:
            exp["jacobi"] = bool(expected["jacobi"])
        p.expected = exp
    _check_mode(p, loc)
    return p


_REQUIRED = {
    "construct": ("structure", "casimirs"),
    "dirac": ("structure", "constraints"),
    "nonholonomic": ("hamiltonian", "positions", "momenta", "constraint_rows"),
    "kernel": ("structure", "alphas", "sigma"),
    "jacobian": ("casimirs",),
}


def _check_mode(p, loc):
    for key in _REQUIRED[p.mode]:
        if key not in p.raw:
            loc.fail(f"mode {p.mode!r} needs \"{key}\"")
    if p.mode == "construct" and "sigma" not in p.raw and "bivector" not in p.raw:
        loc.fail("mode 'construct' needs \"sigma\" (or \"bivector\" for verify)")
    if p.mode in ("dirac", "kernel") and p.structure_kind != "even":
        loc.fail(f"mode {p.mode!r} needs an even structure (omega0)")
    if p.mode == "jacobian" and len(p.lists["casimirs"]) != p.chart.dim - 2:
        loc.fail(f"mode 'jacobian' needs {p.chart.dim - 2} casimirs")
    if p.mode == "construct" and p.k is not None:
        count = len(p.lists["casimirs"])
        if count != p.chart.dim - 2 * p.k:
            loc.fail(f"k = {p.k} needs {p.chart.dim - 2 * p.k} casimirs, got {count}", p.k)


def load_problem(path):
    """Read and parse a problem file; errors carry line and column."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, exc.lineno, exc.colno, str(path)) from None
    return parse_problem(data, text, str(path))


def dump_problem(data, path=None):
    """Serialize a problem document deterministically."""
    text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def tensor_terms(tensor):
    """``[[coefficient, [names]], ...]`` for a form or multivector."""
    names = tensor.chart.coords
    return [[str(c), [names[i] for i in key]] for key, c in tensor.items()]
