"""The fixed-point operator ``T = (T1, T2)`` on sampled pairs.

    T1(u, v)(t) = A + int_{-inf}^t phi^{-1}( F_f(s) / a(s) ) ds,
    F_f(s)      = int_{-inf}^s f(r, u, v, u', v') dr,

and ``T2`` likewise with ``psi, b, h, B``. The derivative of the image is
stored directly as ``phi^{-1}(F_f(t)/a(t))`` and never differenced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NonFiniteError
from .grid import CompactifiedGrid, GridFunction, SolutionPair, integrate_with_limit
from .homeo import Homeomorphism
from .problem import CoefficientFunction, CoupledProblem, Nonlinearity


@dataclass(frozen=True, eq=False)
class OperatorOutput:
    image: SolutionPair
    inner_f: np.ndarray
    inner_h: np.ndarray
    inner_f_limit: float
    inner_h_limit: float


def evaluate_nonlinearity(n: Nonlinearity, s: SolutionPair) -> np.ndarray:
    """``n`` at every node along the pair's stored values and derivatives."""
    g = s.grid
    u, v = s.u, s.v
    with np.errstate(all="ignore"):
        vals = np.asarray(n(g.t_nodes, u.values, v.values, u.derivative_values, v.derivative_values), dtype=float)
    vals = np.broadcast_to(vals, (g.node_count,)).astype(float)
    bad = ~np.isfinite(vals)
    if bad.any():
        k = int(np.argmax(bad))
        args = (g.t_nodes[k], u.values[k], v.values[k], u.derivative_values[k], v.derivative_values[k])
        raise NonFiniteError(f"{n.label} is non-finite at node {k}, args (t,x,y,z,w)={args}", index=k, detail=args)
    return vals


def _product(x: float, y: float) -> float:
    # a zero factor wins, even against inf
    if x == 0.0 or y == 0.0:
        return 0.0
    return x * y


def _apply_component(homeo: Homeomorphism, coeff: CoefficientFunction, n: Nonlinearity, anchor: float,
                     s: SolutionPair, grid: CompactifiedGrid) -> tuple[GridFunction, np.ndarray, float]:
    if s.grid is not grid:
        raise InvalidParameterError("pair lives on a different grid")
    fv = evaluate_nonlinearity(n, s)
    inner, inner_inf = integrate_with_limit(fv, grid)
    with np.errstate(all="ignore"):
        deriv = np.asarray(homeo.inverse(inner / coeff(grid.t_nodes)), dtype=float)
    bad = ~np.isfinite(deriv)
    if bad.any():
        k = int(np.argmax(bad))
        raise NonFiniteError(f"non-finite derivative of T image at node {k}", index=k)
    cum, total = integrate_with_limit(deriv, grid)
    left_d = float(homeo.inverse(np.float64(_product(0.0, coeff.recip_limit_left))))
    right_d = float(homeo.inverse(np.float64(_product(inner_inf, coeff.recip_limit_right))))
    out = GridFunction(grid, cum + anchor, deriv, float(anchor), float(total + anchor), left_d, right_d)
    return out, inner, inner_inf


def apply_T1(p: CoupledProblem, s: SolutionPair, grid: CompactifiedGrid) -> GridFunction:
    return _apply_component(p.phi, p.a, p.f, p.A, s, grid)[0]


def apply_T2(p: CoupledProblem, s: SolutionPair, grid: CompactifiedGrid) -> GridFunction:
    return _apply_component(p.psi, p.b, p.h, p.B, s, grid)[0]


def apply_T(p: CoupledProblem, s: SolutionPair, grid: CompactifiedGrid) -> OperatorOutput:
    u, Ff, Ff_inf = _apply_component(p.phi, p.a, p.f, p.A, s, grid)
    v, Fh, Fh_inf = _apply_component(p.psi, p.b, p.h, p.B, s, grid)
    return OperatorOutput(SolutionPair(u, v), Ff, Fh, Ff_inf, Fh_inf)


@dataclass
class DiagnosticReport:
    """Sampled version of the relative-compactness criteria on an image pair.

    ``thresholds`` maps each stream (u, du, v, dv) to the smallest ``|t|`` node
    beyond which it stays within ``epsilon`` of its limits on both sides;
    ``None`` means no such threshold exists inside the grid.
    """

    epsilon: float
    thresholds: dict[str, float | None] = field(default_factory=dict)
    bounds: dict[str, float] = field(default_factory=dict)
    max_tail_deviation: dict[str, float] = field(default_factory=dict)

    @property
    def equiconvergent(self) -> bool:
        return all(v is not None for v in self.thresholds.values())

    @property
    def threshold(self) -> float | None:
        if not self.equiconvergent:
            return None
        return max(self.thresholds.values(), default=0.0)

    def summary(self) -> str:
        if not self.equiconvergent:
            bad = [k for k, v in self.thresholds.items() if v is None]
            return f"not equiconvergent at resolution (eps={self.epsilon:g}; streams {', '.join(bad)})"
        return f"equiconvergent beyond |t| > {self.threshold:.6g} (eps={self.epsilon:g})"


def _stream_threshold(t: np.ndarray, vals: np.ndarray, left: float, right: float, eps: float) -> tuple[float | None, float]:
    mid = len(t) // 2
    dev = np.empty_like(vals)
    dev[:mid] = np.abs(vals[:mid] - left)
    dev[mid:] = np.abs(vals[mid:] - right)
    dev[mid] = max(abs(vals[mid] - left), abs(vals[mid] - right))
    bad = ~(dev < eps)
    outer_dev = float(max(dev[0], dev[-1]))
    if not bad.any():
        return 0.0, outer_dev
    if bad[0] or bad[-1]:
        return None, outer_dev
    return float(np.max(np.abs(t[bad]))), outer_dev


def tail_diagnostics(out: OperatorOutput | SolutionPair, grid: CompactifiedGrid, epsilon: float) -> DiagnosticReport:
    """Uniform bounds and equiconvergence thresholds for the four streams."""
    if not epsilon > 0:
        raise InvalidParameterError("epsilon must be positive")
    pair = out.image if isinstance(out, OperatorOutput) else out
    report = DiagnosticReport(epsilon=float(epsilon))
    t = grid.t_nodes
    for name, fn in (("u", pair.u), ("v", pair.v)):
        streams = (
            (name, fn.values, fn.left_limit, fn.right_limit),
            ("d" + name, fn.derivative_values, fn.left_deriv_limit, fn.right_deriv_limit),
        )
        for key, vals, lo, hi in streams:
            thr, dev = _stream_threshold(t, vals, lo, hi, epsilon)
            report.thresholds[key] = thr
            report.max_tail_deviation[key] = dev
            report.bounds[key] = float(max(np.max(np.abs(vals)), abs(lo), abs(hi)))
    return report
