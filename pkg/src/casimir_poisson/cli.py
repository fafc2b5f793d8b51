"""Command-line front end.

::

    python -m casimir_poisson construct problem.json [--format machine]
    python -m casimir_poisson verify problem.json [--check-level fast]
    python -m casimir_poisson fixture "toda(3)" --out fixtures/

Exit status: 0 when every check passes, 1 on a verification failure and
2 on an input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .fixtures import fixture_problem_dict
from .linalg import SingularMatrixError
from .problem_file import ProblemFileError, dump_problem, load_problem, parse_problem
from .runner import CHECK_LEVELS, run
from .symplectic_star import DegenerateFormError

__all__ = ["main", "cmd_construct", "cmd_verify", "cmd_fixture", "render_human", "render_machine"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def render_machine(report):
    return json.dumps(report.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def render_human(report):
    lines = [f"{report.name}: {report.command} (mode {report.mode})"]
    meta = [f"{key} = {value}" for key, value in (("k", report.k), ("f", report.f), ("g", report.g), ("rank", report.rank)) if value is not None]
    if meta:
        lines.append("  " + "   ".join(meta))
    if report.table is not None:
        lines.append("")
        cells = [(f"{{{a}, {b}}}", str(v)) for a, b, v in report.table]
        width = max((len(c) for c, _ in cells), default=0)
        lines.extend(f"  {c.ljust(width)} = {v}" for c, v in cells)
        if not cells:
            lines.append("  all brackets vanish")
    lines.append("")
    for name, ok in report.checks.items():
        lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    for name, ok in report.info.items():
        lines.append(f"  [{'yes ' if ok else 'no  '}] {name}")
    for note in report.notes:
        lines.append(f"  note: {note}")
    lines.append("")
    lines.append("all checks passed" if report.passed else "FAILED: " + "; ".join(report.failures))
    return "\n".join(lines) + "\n"


def _run_file(path, command, fmt, check_level, out):
    problem = load_problem(path)
    report = run(problem, command, check_level)
    out.write(render_machine(report) if fmt == "machine" else render_human(report))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_construct(path, fmt="human", check_level="full", out=None):
    """Build and verify the bracket table of a problem file."""
    return _run_file(path, "construct", fmt, check_level, out or sys.stdout)


def cmd_verify(path, fmt="human", check_level="full", out=None):
    """Run the verification bundle only."""
    return _run_file(path, "verify", fmt, check_level, out or sys.stdout)


def _slug(name):
    return "".join(c if c.isalnum() or c in "_-" else "_" for c in name).strip("_")


def cmd_fixture(name, out_dir=None, fmt="human", out=None):
    """Write a fixture's problem file and its expected table."""
    out = out or sys.stdout
    data = fixture_problem_dict(name)
    parse_problem(data)
    if out_dir is None:
        out.write(dump_problem(data))
        return EXIT_OK
    os.makedirs(out_dir, exist_ok=True)
    stem = _slug(data["name"])
    problem_path = os.path.join(out_dir, f"{stem}.json")
    dump_problem(data, problem_path)
    expected_path = os.path.join(out_dir, f"{stem}.expected.json")
    dump_problem(data.get("expected", {}), expected_path)
    if fmt == "machine":
        out.write(json.dumps({"problem": problem_path, "expected": expected_path}, sort_keys=True) + "\n")
    else:
        out.write(f"wrote {problem_path}\nwrote {expected_path}\n")
    return EXIT_OK


def build_parser():
    def options(suppress):
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--format", choices=("human", "machine"), default=argparse.SUPPRESS if suppress else "human")
        p.add_argument("--check-level", choices=CHECK_LEVELS, default=argparse.SUPPRESS if suppress else "full")
        return p

    parser = argparse.ArgumentParser(
        prog="casimir-poisson",
        description="Poisson brackets with prescribed Casimir functions.",
        parents=[options(False)],
    )
    # subcommands accept the options too without resetting them
    common = options(True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("construct", "build and verify a bracket table"), ("verify", "verify a bivector only")):
        p = sub.add_parser(name, help=text, parents=[common])
        p.add_argument("file")
    p = sub.add_parser("fixture", help="write a built-in fixture", parents=[common])
    p.add_argument("name", nargs="+", help="e.g. toda 3, gl3, r3_jacobian(x^2+y^2+z^2)")
    p.add_argument("--out", metavar="DIR")
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "fixture":
            return cmd_fixture(" ".join(args.name), args.out, args.format, out)
        if args.command == "construct":
            return cmd_construct(args.file, args.format, args.check_level, out)
        return cmd_verify(args.file, args.format, args.check_level, out)
    except KeyError as exc:
        err.write(f"error: {exc.args[0]}\n")
        return EXIT_INPUT
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ProblemFileError, DegenerateFormError, SingularMatrixError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
