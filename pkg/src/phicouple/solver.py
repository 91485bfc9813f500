"""Damped Picard iteration for fixed points of ``T``."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .admissibility import ConnectionClass, classify
from .errors import InvalidParameterError, NonFiniteError
from .grid import (DEFAULT_NODES, DEFAULT_SCALE, CompactifiedGrid, SolutionPair, build_grid, cumulative_integral,
                   pair_distance)
from .operator import DiagnosticReport, apply_T, evaluate_nonlinearity, tail_diagnostics
from .problem import CoupledProblem

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    damping: float = 0.5
    tol: float = 1e-8
    max_iter: int = 200
    L: float = DEFAULT_SCALE
    N: int = DEFAULT_NODES
    tol_class: float = 1e-6
    diag_epsilon: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.damping <= 1.0):
            raise InvalidParameterError(f"damping must lie in (0, 1], got {self.damping!r}")
        if not self.tol > 0:
            raise InvalidParameterError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidParameterError("max_iter must be a positive integer")


@dataclass
class ConvergenceReport:
    iterations: int
    residual_history: list[float]
    converged: bool
    solution: SolutionPair
    ode_residual: float
    classification: ConnectionClass
    diagnostics: DiagnosticReport
    config: SolverConfig
    damping_used: float
    notes: list[str] = field(default_factory=list)

    def summary(self) -> str:
        c = self.classification
        last = self.residual_history[-1] if self.residual_history else float("nan")
        rows = [
            ("converged", str(self.converged).lower()),
            ("iterations", str(self.iterations)),
            ("final_residual", f"{last:.17g}"),
            ("ode_residual", f"{self.ode_residual:.17g}"),
            ("damping", f"{self.damping_used:.17g}"),
            ("kind", c.kind),
            ("u_left", f"{self.solution.u.left_limit:.17g}"),
            ("u_right", f"{self.solution.u.right_limit:.17g}"),
            ("v_left", f"{self.solution.v.left_limit:.17g}"),
            ("v_right", f"{self.solution.v.right_limit:.17g}"),
            ("u_displacement", f"{c.u_displacement:.17g}"),
            ("v_displacement", f"{c.v_displacement:.17g}"),
            ("du_right_limit", f"{self.solution.u.right_deriv_limit:.17g}"),
            ("dv_right_limit", f"{self.solution.v.right_deriv_limit:.17g}"),
            ("tails", self.diagnostics.summary()),
        ]
        rows += [("note", n) for n in self.notes]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def solve(p: CoupledProblem, cfg: SolverConfig | None = None, grid: CompactifiedGrid | None = None) -> ConvergenceReport:
    """Iterate ``s <- (1 - lam) s + lam T(s)`` from the constant pair ``(A, B)``.

    Stops once ``||s - T(s)||`` drops to ``cfg.tol`` and returns the image
    ``T(s)`` of the last iterate. If the residual grows tenfold over five
    iterations the damping is halved once; a second such event gives up.
    Non-convergence is reported, not raised.

    Raises:
        NonFiniteError: an iterate became non-finite (``index`` is the iteration).
    """
    cfg = cfg or SolverConfig()
    grid = grid or build_grid(cfg.L, cfg.N)
    lam = cfg.damping
    s = SolutionPair.constant(grid, p.A, p.B)
    history: list[float] = []
    notes: list[str] = []
    guard_trips = 0
    last_trip = -1
    converged = False
    image = s
    for it in range(1, cfg.max_iter + 1):
        try:
            image = apply_T(p, s, grid).image
        except NonFiniteError as exc:
            raise NonFiniteError(f"iteration {it}: {exc}", index=it, detail=exc.index) from exc
        res = pair_distance(s, image)
        if not np.isfinite(res):
            raise NonFiniteError(f"non-finite residual at iteration {it}", index=it)
        history.append(res)
        log.debug("iter %d residual %.3e", it, res)
        if res <= cfg.tol:
            converged = True
            break
        k = len(history)
        if k > 5 and k - 5 > last_trip and history[-1] > 10.0 * history[-6]:
            guard_trips += 1
            last_trip = k
            if guard_trips == 1:
                lam *= 0.5
                notes.append(f"residual grew 10x over 5 iterations at iteration {it}; damping halved to {lam:g}")
            else:
                notes.append(f"residual grew 10x again at iteration {it}; aborted")
                break
        s = s.combine(image, 1.0 - lam, lam)
        if not s.is_finite():
            raise NonFiniteError(f"non-finite iterate at iteration {it}", index=it)

    solution = image if converged else s
    return ConvergenceReport(
        iterations=len(history),
        residual_history=history,
        converged=converged,
        solution=solution,
        ode_residual=verify_solution(p, solution, grid),
        classification=classify(p, solution, cfg.tol_class),
        diagnostics=tail_diagnostics(solution, grid, cfg.diag_epsilon),
        config=cfg,
        damping_used=lam,
        notes=notes,
    )


def ode_residual_profile(p: CoupledProblem, s: SolutionPair, grid: CompactifiedGrid) -> tuple[np.ndarray, np.ndarray]:
    """Nodewise ``a phi(u') - int f`` and ``b psi(v') - int h`` along ``s``."""
    t = grid.t_nodes
    flux_u = p.a(t) * p.phi.forward(s.u.derivative_values)
    flux_v = p.b(t) * p.psi.forward(s.v.derivative_values)
    # the flux vanishes at -inf, so the antiderivative is anchored at 0 there
    int_f = cumulative_integral(evaluate_nonlinearity(p.f, s), grid)
    int_h = cumulative_integral(evaluate_nonlinearity(p.h, s), grid)
    return flux_u - int_f, flux_v - int_h


def verify_solution(p: CoupledProblem, s: SolutionPair, grid: CompactifiedGrid | None = None) -> float:
    """Max nodal discrepancy of the integrated equations along ``s``."""
    grid = grid or s.grid
    ru, rv = ode_residual_profile(p, s, grid)
    return float(max(np.max(np.abs(ru)), np.max(np.abs(rv))))
