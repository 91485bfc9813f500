import json
import subprocess
import sys

import numpy as np
import pytest

from phicouple import InvalidParameterError, evaluate_conditions, read_pair_csv, rho_min
from phicouple.cli import main, to_json
from phicouple.config import (build_run_config, parse_config_text, parse_terms, polynomial_cosine_nonlinearity,
                              problem_from_fields, rational_coefficient)
from phicouple.problem import check_envelope_domination

ZERO_CFG = """\
# zero forcing between two different fluxes
phi = power:2
psi = linear-cubic:1
a_num = 1, 0, 1     # 1 + t^2
b_num = 2
A = 3
B = -1
N = 201
"""

# the 2-DOF phi side rebuilt from catalog terms
DOF2_PHI_CFG = """\
phi = power:3
psi = power:3
a_num = 1, 0, 0, 0, 1
b_num = 1, 0, 0, 0, 1
f_weight_num = 0, 0, 0, 0, 1
f_weight_den = 1, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 1
f_terms = 0.001:0,0,3,0; 0.001:1,0,0,0; 0.001:3,0,0,0; -0.001:1,1,0,0
f_cos = 1
A = 10
B = 8
"""


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "phicouple.cli", *args], cwd=cwd, capture_output=True, text=True)


def test_parse_config_comments_and_blanks():
    vals = parse_config_text("\n# header\n  L = 3.5  # scale\nN=101\n")
    assert vals == {"L": "3.5", "N": "101"}


@pytest.mark.parametrize("text", ["L 3", "colour = red"])
def test_parse_config_errors(text):
    with pytest.raises(InvalidParameterError):
        parse_config_text(text)


def test_cli_overrides_file_values():
    cfg = build_run_config("solve", {"preset": "dof2-paper", "N": "101", "damping": "0.3"}, {"N": 401, "tol": None})
    assert cfg.N == 401 and cfg.damping == 0.3 and cfg.tol == 1e-8


@pytest.mark.parametrize("command,extra", [("check", {}), ("verify", {}), ("nope", {"rho": 1.0})])
def test_run_config_invariants(command, extra):
    with pytest.raises(InvalidParameterError):
        build_run_config(command, {"preset": "dof2-paper"}, extra)


def test_run_config_needs_problem():
    with pytest.raises(InvalidParameterError):
        build_run_config("solve", {}, {})


def test_rational_coefficient_limits():
    a = rational_coefficient(np.array([1.0, 0, 0, 0, 1]), np.array([1.0]), "a")
    assert (a.recip_limit_left, a.recip_limit_right) == (0.0, 0.0)
    b = rational_coefficient(np.array([1.0, 0, 4]), np.array([1.0, 0, 2]), "b")
    assert b.recip_limit_right == 0.5
    assert float(b(0.0)) == 1.0
    with pytest.raises(InvalidParameterError):
        rational_coefficient(np.array([1.0]), np.array([1.0, 0, 1]), "c")


def test_parse_terms():
    assert parse_terms("2:1,0,0,0; -0.5:0,2,1,0") == [(2.0, (1, 0, 0, 0)), (-0.5, (0, 2, 1, 0))]
    with pytest.raises(InvalidParameterError):
        parse_terms("1:1,0,0")


def test_catalog_envelope_dominates(grid):
    n = polynomial_cosine_nonlinearity(np.array([0.0, 0, 1]), np.array([1.0, 0, 0, 0, 1]),
                                       parse_terms("0.3:1,1,0,0; -2:0,0,0,3"), 0.7, "f")
    for rho in (0.5, 2.0, 9.0):
        assert check_envelope_domination(n, rho, grid).passed


def test_catalog_reproduces_preset_threshold(dof2, grid):
    fields = parse_config_text(DOF2_PHI_CFG)
    p = problem_from_fields(fields, 10.0, 8.0)
    t = grid.t_nodes
    assert np.allclose(p.f.envelope(6.3542, t), dof2.f.envelope(6.3542, t), rtol=1e-14, atol=0)
    assert rho_min(p, grid).rho == pytest.approx(rho_min(dof2, grid).rho, abs=1e-9)
    assert evaluate_conditions(p, 6.3542, grid).feasible


def test_to_json_formats():
    text = to_json({"a": 0.1, "b": [1, True, None], "c": float("inf")})
    assert text == '{"a": 0.10000000000000001, "b": [1, true, null], "c": "inf"}'
    assert json.loads(text)["a"] == 0.1


def test_rho_min_command(tmp_path, capsys):
    assert main(["rho-min", "--preset", "dof2-paper", "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    value = float(out.split()[1])
    assert 6.33 <= value <= 6.37
    assert "margin_phi" in out and "margin_psi" in out
    assert json.loads(out.splitlines()[-1][len("summary "):])["rho_min"] == value


def test_check_rho1_infeasible(tmp_path, capsys):
    assert main(["check", "--preset", "dof2-paper", "--rho", "1", "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert any(line.split() == ["feasible", "false"] for line in out.splitlines())
    summary = json.loads(out.splitlines()[-1][len("summary "):])
    assert summary["feasible"] is False
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["feasible"] is False and report["rho"] == 1.0


def test_check_rho7_feasible(tmp_path, capsys):
    assert main(["check", "--preset", "dof2-paper", "--rho", "7", "-o", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "report.json").read_text())["feasible"] is True


def test_solve_writes_artifacts_and_verifies(tmp_path, capsys):
    assert main(["solve", "--preset", "dof2-paper", "-o", str(tmp_path)]) == 0
    for name in ("solution.csv", "report.txt", "plot.gp"):
        assert (tmp_path / name).exists()
    plot = (tmp_path / "plot.gp").read_text()
    assert "using 2:3" in plot and "using 2:5" in plot and "solution.csv" in plot
    assert "kind            heteroclinic" in (tmp_path / "report.txt").read_text()
    capsys.readouterr()
    assert main(["verify", "--preset", "dof2-paper", "--input", str(tmp_path / "solution.csv")]) == 0
    out = capsys.readouterr().out
    residual = float(out.split()[1])
    pair = read_pair_csv(tmp_path / "solution.csv")
    assert residual <= 10 * 1e-8 * (1 + max(pair.u.sup_norm(), pair.v.sup_norm()))


def test_zero_forcing_user_problem(tmp_path, capsys):
    cfg = tmp_path / "zero.cfg"
    cfg.write_text(ZERO_CFG)
    assert main(["solve", "--config", str(cfg), "-o", str(tmp_path / "out")]) == 0
    pair = read_pair_csv(tmp_path / "out" / "solution.csv")
    assert np.all(pair.u.values == 3.0) and np.all(pair.v.values == -1.0)
    assert np.all(pair.u.derivative_values == 0.0) and np.all(pair.v.derivative_values == 0.0)
    assert pair.grid.node_count == 201


def test_solve_deterministic_bytes(tmp_path):
    for d in ("a", "b"):
        r = run_cli(["solve", "--preset", "dof2-paper", "--N", "1001", "-o", d], tmp_path)
        assert r.returncode == 0, r.stderr
    assert (tmp_path / "a" / "solution.csv").read_bytes() == (tmp_path / "b" / "solution.csv").read_bytes()
    assert (tmp_path / "a" / "report.txt").read_bytes() == (tmp_path / "b" / "report.txt").read_bytes()


def _reason(stderr, status, kind):
    lines = stderr.strip().splitlines()
    assert len(lines) == 1
    prefix = f"phicouple: status={status} kind={kind} reason="
    assert lines[0].startswith(prefix)
    return json.loads(lines[0][len(prefix):])


def test_exit_validation(tmp_path):
    r = run_cli(["check", "--preset", "no-such-preset", "--rho", "1"], tmp_path)
    assert r.returncode == 1
    assert "no-such-preset" in _reason(r.stderr, 1, "validation")


def test_exit_validation_bad_homeomorphism(tmp_path):
    (tmp_path / "bad.cfg").write_text("phi = power:0.5\n")
    r = run_cli(["solve", "--config", "bad.cfg"], tmp_path)
    assert r.returncode == 1
    _reason(r.stderr, 1, "validation")


def test_exit_validation_failed_hypothesis(tmp_path):
    (tmp_path / "neg.cfg").write_text("a_num = 0, 1\n")  # a(t) = t changes sign
    r = run_cli(["solve", "--config", "neg.cfg"], tmp_path)
    assert r.returncode == 1
    assert "H2" in _reason(r.stderr, 1, "validation")


def test_exit_nonconvergence(tmp_path):
    r = run_cli(["solve", "--preset", "dof2-paper", "--max-iter", "2", "-o", "out"], tmp_path)
    assert r.returncode == 2
    assert "no convergence" in _reason(r.stderr, 2, "non-convergence")
    assert (tmp_path / "out" / "solution.csv").exists()


def test_exit_io_missing_input(tmp_path):
    r = run_cli(["verify", "--preset", "dof2-paper", "--input", "missing.csv"], tmp_path)
    assert r.returncode == 3
    _reason(r.stderr, 3, "io")


def test_exit_io_unwritable_output(tmp_path):
    (tmp_path / "blocker").write_text("")
    r = run_cli(["check", "--preset", "dof2-paper", "--rho", "7", "-o", "blocker/sub"], tmp_path)
    assert r.returncode == 3
    _reason(r.stderr, 3, "io")


def test_exit_io_missing_config(tmp_path):
    r = run_cli(["solve", "--config", "absent.cfg"], tmp_path)
    assert r.returncode == 3


def test_console_script_help():
    r = subprocess.run(["phicouple", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "rho-min" in r.stdout
