"""Command line: exit codes, JSON schema, determinism and CSV output."""
from __future__ import annotations

import csv
import json

import pytest

from cuspfol.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from cuspfol.report import CSV_COLUMNS, validate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json", "-")
    report = json.loads(out)
    validate(report)
    return code, report


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_list_fixtures(capsys):
    code, out, _ = run(capsys, "--list-fixtures")
    assert code == EXIT_OK
    assert {"alpha5.toml", "moussu.toml", "corner.toml"} <= set(out.split())


def test_analyze_alpha5(capsys):
    code, rep = run_json(capsys, "analyze", "alpha5")
    assert code == EXIT_OK and rep["status"] == "ok"
    checks = rep["checks"]
    for name in ("prop5", "thm6", "thm7", "first-integral"):
        assert checks[name]["status"] == "holds", name


def test_analyze_is_deterministic(capsys):
    _, a, _ = run(capsys, "analyze", "alpha5", "--json", "-")
    _, b, _ = run(capsys, "analyze", "alpha5", "--json", "-")
    assert a == b


@pytest.mark.parametrize("fixture,check,status", [
    ("moussu", "cor4", "fails"),
    ("alpha17", "thm7", "fails"),
    ("dulac", "thm7", "fails"),
    ("prop5", "prop5", "fails"),
])
def test_fixture_verdicts(capsys, fixture, check, status):
    code, rep = run_json(capsys, "analyze", fixture)
    assert code == EXIT_OK
    assert rep["checks"][check]["status"] == status


def test_boundary_is_config_error(capsys):
    code, out, err = run(capsys, "analyze", "alpha4")
    assert code == EXIT_CONFIG
    assert "alpha = +-4 is excluded" in err
    code, rep = run_json(capsys, "analyze", "alpha4")
    assert code == EXIT_CONFIG and rep["status"] == "error"


def test_missing_config_and_bad_override(capsys, tmp_path):
    assert run(capsys, "analyze", str(tmp_path / "nope.toml"))[0] == EXIT_CONFIG
    assert run(capsys, "analyze", "alpha5", "--order", "0")[0] == EXIT_CONFIG
    bad = write(tmp_path, "[family]\np = 2\nq = 2\nn = 1\nk = 2\nalpha = 5\n")
    assert run(capsys, "analyze", bad)[0] == EXIT_CONFIG
    assert run(capsys, "blowup", "alpha5", "--steps", "-1")[0] == EXIT_CONFIG
    assert run(capsys)[0] == EXIT_CONFIG


def test_numeric_failure_exit_code(capsys, tmp_path):
    cfg = write(tmp_path, '[form]\ntext = "z*dx + 2*x*dz"\nvars = ["x", "z"]\ndivisor = "z"\n'
                          'marked = [0, 0.5]\nbasepoint = 1\nradius = 0.5\n')
    code, rep = run_json(capsys, "holonomy", cfg)
    assert code == EXIT_NUMERIC
    assert "radius too large" in rep["error"]["message"]


def test_holonomy_corner_and_csv(capsys, tmp_path):
    path = tmp_path / "orbit.csv"
    code, rep = run_json(capsys, "holonomy", "corner", "--csv", str(path))
    assert code == EXIT_OK
    (gen,) = rep["holonomy"]["generators"]
    assert abs(gen["multiplier"]["re"] + 1) < 1e-8 and gen["periodicity_order"] == 2
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) > 1


def test_trivial_form_has_no_generators(capsys, tmp_path):
    cfg = write(tmp_path, '[form]\ntext = "dz"\nvars = ["x", "z"]\ndivisor = "z"\nmarked = []\nbasepoint = 1\n')
    code, rep = run_json(capsys, "holonomy", cfg)
    assert code == EXIT_OK
    assert rep["holonomy"]["generators"] == []


def test_blowup_output(capsys):
    code, out, _ = run(capsys, "blowup", "alpha5")
    assert code == EXIT_OK
    assert out.splitlines()[0] == \
        "(2*y*w^2 + 5*y*w + 2*y)*dx + (2*x*w^2 + 5*x*w + 2*x)*dy + (2*x*y*w + 5*x*y)*dw"
    code, out, _ = run(capsys, "blowup", "alpha5", "--steps", "0")
    assert out.splitlines()[0] == "2*x*y^2*dx + 2*x^2*y*dy + (5*x*y + 2*z)*dz"


def test_section_and_verify_integral(capsys):
    code, rep = run_json(capsys, "section", "alpha5")
    assert code == EXIT_OK
    assert rep["section"]["certificate"]["nonzero"]
    code, rep = run_json(capsys, "verify-integral", "alpha5", "--F", "(t+2*z)^3/(2*t+z)")
    assert code == EXIT_OK and rep["checks"]["first-integral"]["status"] == "fails"


def test_classify_and_float_mode(capsys):
    code, rep = run_json(capsys, "classify", "alpha5", "--float")
    assert code == EXIT_OK
    assert rep["config"]["exact"] is False
