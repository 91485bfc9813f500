"""Sufficient-condition checks, feasibility radius search, and connection type.

For a radius ``rho`` the envelope conditions are the four numbers

    I_phi = int phi^{-1}( (int theta_rho) / a(s) ) ds,   S_phi = sup_t phi^{-1}( (int theta_rho) / a(t) ),
    I_psi = int psi^{-1}( (int eta_rho)   / b(s) ) ds,   S_psi = sup_t psi^{-1}( (int eta_rho)   / b(t) ),

and ``rho`` is called feasible when ``I_phi < rho`` and ``I_psi < rho``.
Finiteness alone is enough for a fixed point to exist; the self-consistency
inequality is what yields a threshold. ``|A|`` and ``|B|`` are deliberately
left out of the inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NonFiniteError
from .grid import CompactifiedGrid, SolutionPair, full_line_integral
from .problem import CoupledProblem
from .quadrature import oracle_full_line_integral

DEFAULT_BRACKET_HI = 1e6


@dataclass
class AdmissibilityReport:
    radius: float
    integral_phi_side: float
    integral_psi_side: float
    sup_phi_side: float
    sup_psi_side: float
    inner_phi: float
    inner_psi: float
    feasible: bool
    finite: bool
    notes: list[str] = field(default_factory=list)

    @property
    def margin_phi(self) -> float:
        return self.radius - self.integral_phi_side

    @property
    def margin_psi(self) -> float:
        return self.radius - self.integral_psi_side

    def as_dict(self) -> dict:
        return {
            "rho": self.radius,
            "integral_phi_side": self.integral_phi_side,
            "integral_psi_side": self.integral_psi_side,
            "sup_phi_side": self.sup_phi_side,
            "sup_psi_side": self.sup_psi_side,
            "inner_phi": self.inner_phi,
            "inner_psi": self.inner_psi,
            "margin_phi": self.margin_phi,
            "margin_psi": self.margin_psi,
            "finite": self.finite,
            "feasible": self.feasible,
            "notes": list(self.notes),
        }


def _side(homeo, coeff, inner: float, grid: CompactifiedGrid) -> tuple[float, float]:
    with np.errstate(all="ignore"):
        g = np.asarray(homeo.inverse(inner / coeff(grid.t_nodes)), dtype=float)
    if not np.all(np.isfinite(g)):
        return math.inf, math.inf
    sup_val = float(np.max(g))
    try:
        return full_line_integral(g, grid), sup_val
    except NonFiniteError:
        return math.inf, sup_val


def evaluate_conditions(p: CoupledProblem, rho: float, grid: CompactifiedGrid) -> AdmissibilityReport:
    if not rho > 0:
        raise InvalidParameterError("rho must be positive")
    notes = []
    inners = []
    for env in (p.f.envelope, p.h.envelope):
        with np.errstate(all="ignore"):
            vals = np.asarray(env(rho, grid.t_nodes), dtype=float) * np.ones(grid.node_count)
        if np.all(np.isfinite(vals)):
            inners.append(full_line_integral(vals, grid))
        else:
            inners.append(math.inf)
            notes.append("envelope is non-finite on the grid: inner integral diverges")
    i_phi, s_phi = _side(p.phi, p.a, inners[0], grid) if math.isfinite(inners[0]) else (math.inf, math.inf)
    i_psi, s_psi = _side(p.psi, p.b, inners[1], grid) if math.isfinite(inners[1]) else (math.inf, math.inf)
    finite = all(math.isfinite(x) for x in (i_phi, i_psi, s_phi, s_psi))
    feasible = finite and i_phi < rho and i_psi < rho
    notes.extend(p.notes)
    return AdmissibilityReport(rho, i_phi, i_psi, s_phi, s_psi, inners[0], inners[1], feasible, finite, notes)


@dataclass
class RhoMinResult:
    rho: float | None
    found: bool
    monotone: bool
    report: AdmissibilityReport | None
    evaluations: int
    message: str = ""

    def summary(self) -> str:
        if not self.found:
            return self.message
        r = self.report
        return (f"rho_min = {self.rho:.17g}  margin_phi = {r.margin_phi:.6g}  margin_psi = {r.margin_psi:.6g}"
                + ("" if self.monotone else "  (non-monotone feasibility)"))


def _search(feasible, bracket_hi: float, tol: float):
    """Downward halving ladder from ``bracket_hi``, then bisection on the lowest transition."""
    evaluations = 0

    def feas(r):
        nonlocal evaluations
        evaluations += 1
        return feasible(r)

    if not feas(bracket_hi):
        return None, False, evaluations
    ladder = [(bracket_hi, True)]
    r = bracket_hi
    while r > tol:
        r *= 0.5
        ladder.append((r, feas(r)))
    states = [ok for _, ok in ladder]
    # ladder runs downward; non-monotone means feasible below some infeasible rung
    first_bad = states.index(False) if False in states else None
    monotone = first_bad is None or not any(states[first_bad:])
    lowest = max(i for i, ok in enumerate(states) if ok)
    if lowest == len(ladder) - 1:
        return ladder[lowest][0], monotone, evaluations
    lo, hi = ladder[lowest + 1][0], ladder[lowest][0]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feas(mid):
            hi = mid
        else:
            lo = mid
    return hi, monotone, evaluations


def rho_min(p: CoupledProblem, grid: CompactifiedGrid, bracket_hi: float = DEFAULT_BRACKET_HI,
            tol: float = 1e-6) -> RhoMinResult:
    """Smallest feasible radius in ``(0, bracket_hi]`` to absolute tolerance ``tol``.

    If every ladder point down to ``tol`` is feasible the last one is returned
    (the infimum is at tolerance level). A feasible/infeasible/feasible pattern
    on the ladder is flagged through ``monotone=False``; the lowest transition
    is refined in that case.
    """
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    if not bracket_hi > 0:
        raise InvalidParameterError("bracket_hi must be positive")
    rho, monotone, n = _search(lambda r: evaluate_conditions(p, r, grid).feasible, bracket_hi, tol)
    if rho is None:
        return RhoMinResult(None, False, True, None, n, f"infeasible up to bracket {bracket_hi:g}")
    return RhoMinResult(rho, True, monotone, evaluate_conditions(p, rho, grid), n)


def oracle_conditions(p: CoupledProblem, rho: float, rel_tol: float = 1e-12) -> tuple[float, float]:
    """``(I_phi, I_psi)`` by nested adaptive Simpson quadrature (no grid)."""
    out = []
    for env, homeo, coeff in ((p.f.envelope, p.phi, p.a), (p.h.envelope, p.psi, p.b)):
        inner = oracle_full_line_integral(lambda r: float(env(rho, np.float64(r))), 1e-300, rel_tol=rel_tol)
        outer = oracle_full_line_integral(lambda s: float(homeo.inverse(inner / coeff(np.float64(s)))), 1e-300,
                                          rel_tol=rel_tol)
        out.append(outer)
    return out[0], out[1]


def oracle_rho_min(p: CoupledProblem, bracket_hi: float = DEFAULT_BRACKET_HI, tol: float = 1e-6) -> float | None:
    """Grid-free counterpart of :func:`rho_min` (same ladder, adaptive quadrature)."""

    def feasible(r):
        i_phi, i_psi = oracle_conditions(p, r)
        return i_phi < r and i_psi < r

    return _search(feasible, bracket_hi, tol)[0]


@dataclass(frozen=True)
class ConnectionClass:
    kind: str
    u_displacement: float
    v_displacement: float


def classify(p: CoupledProblem, s: SolutionPair, tol_class: float = 1e-6) -> ConnectionClass:
    """Homoclinic when both right limits return to the left data within tolerance.

    Tolerances scale as ``tol_class * (1 + |A|)`` and ``tol_class * (1 + |B|)``;
    a non-finite limit gives ``degenerate``.
    """
    du = s.u.right_limit - p.A
    dv = s.v.right_limit - p.B
    if not (math.isfinite(du) and math.isfinite(dv)):
        kind = "degenerate"
    elif abs(du) <= tol_class * (1 + abs(p.A)) and abs(dv) <= tol_class * (1 + abs(p.B)):
        kind = "homoclinic"
    else:
        kind = "heteroclinic"
    return ConnectionClass(kind, float(du), float(dv))
