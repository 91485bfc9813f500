"""Acceptance criteria 1-7, one PASS/FAIL line each (printed in the terminal summary)."""

import math
import subprocess
import sys
import time

import numpy as np

from phicouple import (CoupledProblem, GridFunction, SolutionPair, SolverConfig, adaptive_oracle_integral, apply_T,
                       apply_T1, build_grid, full_line_integral, oracle_rho_min, pair_norm, rho_min, solve)
from phicouple.grid import pair_to_csv
from phicouple.problem import Nonlinearity, check_envelope_domination

from _problems import homoclinic_problem, manufactured_problem, mms_u, mms_v, zero_problem

RESULTS: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_threshold(dof2, tmp_path):
    start = time.perf_counter()
    r = subprocess.run([sys.executable, "-m", "phicouple.cli", "rho-min", "--preset", "dof2-paper"],
                       cwd=tmp_path, capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    cli_value = float(r.stdout.split()[1])
    grid_value = rho_min(dof2, build_grid()).rho
    oracle_value = oracle_rho_min(dof2, tol=1e-6)
    ok = (r.returncode == 0 and abs(cli_value - 6.3542) <= 0.02 and abs(oracle_value - grid_value) <= 1e-3
          and elapsed < 5.0)
    record("1", ok, f"rho_min={cli_value:.10f} (|diff from 6.3542|={abs(cli_value - 6.3542):.2e} <= 0.02), "
                    f"oracle={oracle_value:.10f} (|oracle-grid|={abs(oracle_value - grid_value):.2e} <= 1e-3), "
                    f"cli runtime={elapsed:.2f}s < 5s")


def test_criterion_2_quadrature():
    g = build_grid(5.0, 4001)
    grid_err = abs(full_line_integral(g.t_nodes**4 / (1 + g.t_nodes**6) ** 2, g) - math.pi / 9)
    oracle_err = abs(adaptive_oracle_integral(lambda r: r**4 / (1 + r**6) ** 2, -50.0, 50.0, tol=1e-12) - math.pi / 9)
    record("2", grid_err <= 1e-6 and oracle_err <= 1e-9,
           f"grid N=4001 error={grid_err:.2e} <= 1e-6, adaptive oracle [-50,50] error={oracle_err:.2e} <= 1e-9")


def test_criterion_3_trivial():
    A, B = 3.0, -5.0
    rep = solve(zero_problem(A, B), SolverConfig(damping=1.0))
    s = rep.solution
    scale = 1e-14 * (1 + max(abs(A), abs(B)))
    const = bool(np.all(s.u.values == A) and np.all(s.v.values == B))
    ok = rep.converged and rep.iterations == 1 and const and rep.residual_history[-1] <= scale \
        and rep.ode_residual <= scale
    record("3", ok, f"iterations={rep.iterations}, constant pair={const}, residual={rep.residual_history[-1]:.1e}, "
                    f"ode residual={rep.ode_residual:.1e} (bound {scale:.0e})")


def _mms_error(N):
    rep = solve(manufactured_problem(), SolverConfig(damping=1.0, N=N))
    t = rep.solution.grid.t_nodes
    return max(np.max(np.abs(rep.solution.u.values - mms_u(t))), np.max(np.abs(rep.solution.v.values - mms_v(t))))


def test_criterion_4_manufactured():
    e1, e2 = _mms_error(1001), _mms_error(2001)
    ratio = e1 / e2
    record("4", 3.2 <= ratio <= 4.8 and e2 < 1e-4,
           f"sup error N=1001 {e1:.3e}, N=2001 {e2:.3e}, ratio={ratio:.3f} in [3.2, 4.8], error < 1e-4")


def _smooth(x, width=9):
    kernel = np.ones(width) / width
    return np.convolve(x, kernel, mode="valid")


def _local_maxima(x):
    return int(np.sum((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:])))


def test_criterion_5_dof2(dof2):
    rep = solve(dof2, SolverConfig(damping=0.5, tol=1e-8, max_iter=200))
    s = rep.solution
    left_exact = (s.u.left_limit, s.v.left_limit) == (10.0, 8.0)
    dlim = max(abs(s.u.right_deriv_limit), abs(s.v.right_deriv_limit))
    # qualitative shape on smoothed profiles
    us, vs = _smooth(s.u.values), _smooth(s.v.values)
    u_trend = bool(np.all(np.diff(us) >= -1e-12)) and s.u.right_limit > 10.0
    u_structure = _local_maxima(s.u.derivative_values) >= 2
    v_trend = bool(np.all(np.diff(vs) <= 1e-12)) and s.v.right_limit < 8.0
    ok = (rep.converged and rep.iterations <= 200 and left_exact and dlim < 1e-6
          and rep.classification.kind == "heteroclinic" and rep.ode_residual <= 1e-6
          and u_trend and u_structure and v_trend)
    record("5", ok, f"converged={rep.converged} in {rep.iterations} iterations, left limits exact={left_exact}, "
                    f"max right derivative limit={dlim:.1e}, kind={rep.classification.kind}, "
                    f"ode residual={rep.ode_residual:.2e}; u rises 10 -> {s.u.right_limit:.4f} with "
                    f"{_local_maxima(s.u.derivative_values)} local maxima of u', "
                    f"v falls 8 -> {s.v.right_limit:.4f} monotonically")


def test_criterion_6_homoclinic():
    p = homoclinic_problem()
    rep = solve(p, SolverConfig(damping=1.0, N=4001))
    c = rep.classification
    ok = rep.converged and abs(c.u_displacement) <= 1e-6 and abs(c.v_displacement) <= 1e-6 and c.kind == "homoclinic"
    record("6", ok, f"u displacement={c.u_displacement:.2e}, v displacement={c.v_displacement:.2e} "
                    f"(<= 1e-6), kind={c.kind}")


def _random_pair(grid, seed, A=None, B=None):
    rng = np.random.default_rng(seed)
    n = grid.node_count
    u = GridFunction(grid, rng.normal(size=n), rng.normal(size=n), rng.normal() if A is None else A, rng.normal())
    v = GridFunction(grid, rng.normal(size=n), rng.normal(size=n), rng.normal() if B is None else B, rng.normal())
    return SolutionPair(u, v)


def test_criterion_7_properties(dof2, grid):
    seeds = [1, 2, 4, 8, 16, 32, 64, 128]
    small = build_grid(3.0, 401)

    left = True
    for k in seeds:
        img = apply_T(dof2, _random_pair(small, k), small).image
        left &= img.u.left_limit == dof2.A and img.v.left_limit == dof2.B

    # monotone comparison: add a nonnegative bump to f along the same input pair
    bumped = CoupledProblem(dof2.phi, dof2.psi, dof2.a, dof2.b,
                            Nonlinearity(lambda t, x, y, z, w: dof2.f(t, x, y, z, w) + np.exp(-np.asarray(t) ** 2),
                                         dof2.f.envelope, "bumped"), dof2.h, dof2.A, dof2.B)
    mono = True
    for k in seeds:
        s = _random_pair(small, k, A=dof2.A, B=dof2.B)
        u1, u2 = apply_T1(dof2, s, small), apply_T1(bumped, s, small)
        mono &= bool(np.all(u1.values <= u2.values))

    dom = all(check_envelope_domination(n, rho, grid).passed for rho in (1.0, 6.3542, 10.0) for n in (dof2.f, dof2.h))

    axioms = True
    for k in seeds:
        p, q = _random_pair(small, k), _random_pair(small, 1000 + k)
        axioms &= pair_norm(p) >= 0
        axioms &= all(abs(pair_norm(p.combine(p, c, 0.0)) - abs(c) * pair_norm(p)) <= 1e-15 * pair_norm(p)
                      for c in (-2.0, 0.0, 0.5, 3.0))
        axioms &= pair_norm(p.combine(q, 1.0, 1.0)) <= pair_norm(p) + pair_norm(q) + 1e-15

    a, b = solve(dof2), solve(dof2)
    determinism = pair_to_csv(a.solution) == pair_to_csv(b.solution) \
        and a.residual_history == b.residual_history

    ok = left and mono and dom and axioms and determinism
    record("7", ok, f"left-limit exactness={left}, monotone comparison={mono}, envelope domination at "
                    f"rho in {{1, 6.3542, 10}}={dom}, pair-norm axioms={axioms}, determinism={determinism}")
