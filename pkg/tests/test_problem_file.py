import copy
import json

import pytest

from casimir_poisson import ProblemFileError, fixture, load_problem, parse_problem
from casimir_poisson.fixtures import fixture_problem_dict, parse_fixture_name
from casimir_poisson.problem_file import dump_problem, tensor_terms

NAMES = [
    "toda(3)", "toda(4)", "volterra_companion(4)", "gl3", "r3_jacobian",
    "r3_jacobian(x*y*z)", "dirac(4)", "dirac(6)", "holonomic", "nonholonomic",
]


@pytest.mark.parametrize("name", NAMES)
def test_fixture_documents_round_trip(name, tmp_path):
    data = fixture_problem_dict(name)
    path = tmp_path / "p.json"
    dump_problem(data, path)
    again = load_problem(path)
    assert again == parse_problem(data)
    assert json.loads(path.read_text()) == data


@pytest.mark.parametrize("name", NAMES)
def test_dump_is_deterministic(name):
    assert dump_problem(fixture_problem_dict(name)) == dump_problem(fixture_problem_dict(name))


def test_tensor_terms_round_trip():
    fx = fixture("toda(3)")
    sigma = fx.problem.tensors["sigma"]
    data = copy.deepcopy(fx.data)
    data["sigma"] = tensor_terms(sigma)
    assert parse_problem(data).tensors["sigma"] == sigma


@pytest.mark.parametrize("text", ["toda(3)", "toda 3", "toda:3", "toda3"])
def test_fixture_name_forms(text):
    assert parse_fixture_name(text) == ("toda", "3")
    assert fixture_problem_dict(text) == fixture_problem_dict("toda(3)")


def test_fixture_names_without_arguments():
    assert parse_fixture_name("gl3") == ("gl3", None)
    assert parse_fixture_name("r3_jacobian(x^2+y^2+z^2)") == ("r3_jacobian", "x^2+y^2+z^2")


def test_unknown_fixture_lists_names():
    with pytest.raises(KeyError) as info:
        fixture_problem_dict("lorenz")
    assert "toda" in str(info.value)


def _write(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    return path


def test_json_syntax_error_is_located(tmp_path):
    path = _write(tmp_path, '{\n  "format": "casimir-poisson/1",\n  "name": "x",\n}\n')
    with pytest.raises(ProblemFileError) as info:
        load_problem(path)
    assert info.value.line == 4


def test_expression_error_is_located(tmp_path):
    data = fixture_problem_dict("toda(3)")
    data["casimirs"][0] = "b1 + b2 +"
    text = json.dumps(data, indent=2)
    path = _write(tmp_path, text)
    with pytest.raises(ProblemFileError) as info:
        load_problem(path)
    line_no = next(i for i, line in enumerate(text.splitlines(), 1) if "b1 + b2 +" in line)
    assert info.value.line == line_no
    assert "casimirs[0]" in str(info.value)


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.pop("structure"), "structure"),
        (lambda d: d.update(mode="party"), "mode"),
        (lambda d: d.update(coordinates=["a1", "a1", "a2", "b1", "b2", "b3"]), "a1"),
        (lambda d: d.update(k=5), "k"),
        (lambda d: d.update(format="other/9"), "format"),
        (lambda d: d["casimirs"].append("zz"), ""),
    ],
)
def test_invalid_documents(mutate, fragment):
    data = fixture_problem_dict("toda(3)")
    mutate(data)
    with pytest.raises(ProblemFileError) as info:
        parse_problem(data)
    assert fragment in str(info.value)
