import io
import json
import subprocess
import sys

import pytest

from casimir_poisson.cli import main
from casimir_poisson.fixtures import fixture_problem_dict
from casimir_poisson.problem_file import dump_problem

FIXTURES = ["toda(3)", "volterra_companion(3)", "gl3", "r3_jacobian", "dirac(4)", "dirac(6)", "holonomic", "nonholonomic"]


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def _file(tmp_path, name, mutate=None):
    data = fixture_problem_dict(name)
    if mutate:
        mutate(data)
    path = tmp_path / "problem.json"
    dump_problem(data, path)
    return str(path)


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("command", ["construct", "verify"])
def test_fixtures_pass_both_commands(tmp_path, name, command):
    code, out, err = run(command, _file(tmp_path, name))
    assert code == 0, out + err
    assert out.rstrip().endswith("all checks passed")


def test_human_table(tmp_path):
    code, out, _ = run("construct", _file(tmp_path, "toda(3)"))
    assert code == 0
    assert "{a1, b1} = a1" in out
    assert "{a3, b1} = -a3" in out
    assert "k = 2" in out and "f = -a1*a2 - a1*a3 - a2*a3" in out


def test_machine_output_is_deterministic(tmp_path):
    path = _file(tmp_path, "gl3")
    first = run("--format", "machine", "construct", path)
    second = run("construct", path, "--format", "machine")
    assert first == second
    doc = json.loads(first[1])
    assert doc["status"] == "pass" and doc["k"] == 3
    assert ["x1", "y1", "-y1"] in doc["table"]


def test_fast_level_runs_fewer_checks(tmp_path):
    path = _file(tmp_path, "toda(3)")
    fast = json.loads(run("construct", path, "--format", "machine", "--check-level", "fast")[1])
    full = json.loads(run("construct", path, "--format", "machine")[1])
    assert set(fast["checks"]) < set(full["checks"])


def test_verify_reports_first_failing_triple(tmp_path):
    def bend(d):
        # the Toda table with {a3, b1} = -a1 instead of -a3
        rows = [[v if (a, b) != ("a3", "b1") else "-a1", [a, b]] for a, b, v in d["expected"]["table"]]
        d.pop("sigma")
        d.pop("expected")
        d["bivector"] = rows

    code, out, _ = run("verify", _file(tmp_path, "toda(3)", bend))
    assert code == 1
    assert "first failing triple" in out


def test_bad_sigma_fails_construct(tmp_path):
    def bend(d):
        d["sigma"][0][0] = "b1*(" + d["sigma"][0][0] + ")"

    code, out, _ = run("construct", _file(tmp_path, "toda(3)", bend))
    assert code == 1
    assert "[FAIL]" in out


def test_input_errors_exit_2(tmp_path):
    assert run("construct", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"name\": \n}")
    code, _, err = run("construct", str(bad))
    assert code == 2 and "line 3" in err
    code, _, err = run("fixture", "lorenz")
    assert code == 2 and "available" in err
    assert run("explode")[0] == 2
    assert run("construct", str(bad), "--format", "xml")[0] == 2


def test_fixture_command_writes_files(tmp_path):
    code, out, _ = run("fixture", "toda", "3", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "toda3.json").exists()
    expected = json.loads((tmp_path / "toda3.expected.json").read_text())
    assert ["a1", "b1", "a1"] in expected["table"]
    assert run("construct", str(tmp_path / "toda3.json"))[0] == 0


def test_fixture_command_prints_document():
    code, out, _ = run("fixture", "gl3")
    assert code == 0
    assert json.loads(out)["name"] == "gl3"


def test_module_entry_point(tmp_path):
    path = _file(tmp_path, "r3_jacobian")
    proc = subprocess.run(
        [sys.executable, "-m", "casimir_poisson", "construct", path, "--format", "machine"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["status"] == "pass"
