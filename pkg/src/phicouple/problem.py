"""The coupled problem and its sampled hypothesis checks.

A problem is the tuple ``(phi, psi, a, b, f, h, A, B)`` for

    (a(t) phi(u'))' = f(t, u, v, u', v'),   u(-inf) = A,  u'(+inf) = 0,
    (b(t) psi(v'))' = h(t, u, v, u', v'),   v(-inf) = B,  v'(+inf) = 0.

Every callable is vectorised: coefficient functions take an array of ``t``,
nonlinearities take five broadcastable arrays, envelopes take ``(rho, t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameterError, ProblemValidationError
from .grid import CompactifiedGrid, full_line_integral
from .homeo import Homeomorphism, validate_h1
from .validation import ValidationReport


@dataclass(frozen=True)
class CoefficientFunction:
    """Positive coefficient ``a(t)`` with declared limits of ``1/a`` at -inf/+inf."""

    eval: Callable[[np.ndarray], np.ndarray]
    recip_limit_left: float
    recip_limit_right: float
    label: str = "a"

    def __call__(self, t):
        return self.eval(t)


@dataclass(frozen=True)
class CaratheodoryEnvelope:
    """Integrable bound ``theta_rho(t)`` for ``|f|`` on the box ``[-rho, rho]^4``."""

    eval: Callable[[float, np.ndarray], np.ndarray]
    rho_ladder: tuple[float, ...] = (0.5, 1.0, 2.0, 5.0, 10.0, 100.0)

    def __call__(self, rho, t):
        return self.eval(rho, t)


@dataclass(frozen=True)
class Nonlinearity:
    eval: Callable[..., np.ndarray]
    envelope: CaratheodoryEnvelope
    label: str = "f"

    def __call__(self, t, x, y, z, w):
        return self.eval(t, x, y, z, w)


@dataclass(frozen=True)
class CoupledProblem:
    phi: Homeomorphism
    psi: Homeomorphism
    a: CoefficientFunction
    b: CoefficientFunction
    f: Nonlinearity
    h: Nonlinearity
    A: float
    B: float
    label: str = "problem"
    notes: tuple[str, ...] = field(default=())


def validate_h2(c: CoefficientFunction, probe_horizon: float = 10.0, samples: int = 401) -> ValidationReport:
    """Positivity of ``c`` on ``[-H, H]`` and at ``+-10 H`` (fatal), and an
    advisory comparison of ``1/c(+-10 H)`` with the declared limits.

    The limit check accepts deviations up to 10% of ``max(|declared|, 1)``.
    """
    if not probe_horizon > 0:
        raise InvalidParameterError("probe_horizon must be positive")
    report = ValidationReport(subject=f"H2[{c.label}]")
    far = 10.0 * probe_horizon
    t = np.concatenate([[-far], np.linspace(-probe_horizon, probe_horizon, samples), [far]])
    with np.errstate(all="ignore"):
        vals = np.asarray(c(t), dtype=float) * np.ones_like(t)
    bad = ~(np.isfinite(vals) & (vals > 0))
    report.record("positive", not bad.any(), witness=float(t[np.argmax(bad)]) if bad.any() else None)
    limits_ok = np.isfinite(c.recip_limit_left) and np.isfinite(c.recip_limit_right)
    report.record("finite_recip_limits", bool(limits_ok), witness=(c.recip_limit_left, c.recip_limit_right))
    if not bad.any():
        for name, observed, declared in (
            ("recip_limit_left", 1.0 / vals[0], c.recip_limit_left),
            ("recip_limit_right", 1.0 / vals[-1], c.recip_limit_right),
        ):
            ok = abs(observed - declared) <= 0.1 * max(abs(declared), 1.0)
            report.advisories[name] = bool(ok)
            if not ok:
                report.notes.append(f"{name}: 1/a at probe = {observed:.6g}, declared {declared:.6g}")
    return report


def box_lattice(rho: float, samples_per_node: int) -> np.ndarray:
    """Points of ``[-rho, rho]^4`` on a ``(2k+1)^4`` lattice: corners, center, and faces."""
    levels = np.linspace(-rho, rho, 2 * samples_per_node + 1)
    mesh = np.meshgrid(levels, levels, levels, levels, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=0)


def check_envelope_domination(n: Nonlinearity, rho: float, grid: CompactifiedGrid,
                              samples_per_node: int = 1) -> ValidationReport:
    """Sample ``|f(t, x, y, z, w)| <= envelope(rho, t)`` at every grid node.

    ``worst_margin`` is the minimum of ``envelope - |f|`` over all samples.
    """
    if not rho > 0:
        raise InvalidParameterError("rho must be positive")
    if samples_per_node < 1:
        raise InvalidParameterError("samples_per_node must be >= 1")
    report = ValidationReport(subject=f"envelope[{n.label}, rho={rho:g}]")
    pts = box_lattice(rho, samples_per_node)
    t = grid.t_nodes[:, None]
    with np.errstate(all="ignore"):
        fv = np.asarray(n(t, pts[0][None, :], pts[1][None, :], pts[2][None, :], pts[3][None, :]), dtype=float)
        fv = np.broadcast_to(fv, (grid.node_count, pts.shape[1]))
        env = np.asarray(n.envelope(rho, grid.t_nodes), dtype=float) * np.ones(grid.node_count)
    margin = env[:, None] - np.abs(fv)
    bad = ~(margin >= 0)  # NaN counts as a violation
    if bad.any():
        i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
        report.record("dominated", False,
                      witness=(float(grid.t_nodes[i]),) + tuple(float(x) for x in pts[:, j]))
        report.notes.append(f"{int(bad.sum())} violating samples")
    else:
        report.record("dominated", True)
    finite = margin[np.isfinite(margin)]
    report.worst_margin = float(finite.min()) if finite.size else float("nan")
    return report


def validate_envelope(env: CaratheodoryEnvelope, grid: CompactifiedGrid, label: str = "envelope") -> ValidationReport:
    """Nonnegativity, monotonicity in ``rho``, and finite full-line integral on the ladder."""
    report = ValidationReport(subject=f"{label}")
    prev = None
    nonneg, mono, finite = True, True, True
    for rho in env.rho_ladder:
        with np.errstate(all="ignore"):
            vals = np.asarray(env(rho, grid.t_nodes), dtype=float) * np.ones(grid.node_count)
        if not np.all(vals >= 0):
            nonneg = False
            report.witnesses.setdefault("nonnegative", (rho, float(grid.t_nodes[np.argmax(~(vals >= 0))])))
        if prev is not None and np.any(vals < prev):
            mono = False
            report.witnesses.setdefault("monotone_in_rho", (rho, float(grid.t_nodes[np.argmax(vals < prev)])))
        if np.all(np.isfinite(vals)):
            if not np.isfinite(full_line_integral(vals, grid)):
                finite = False
        else:
            finite = False
            report.witnesses.setdefault("integrable", rho)
        prev = vals
    report.record("nonnegative", nonneg)
    report.record("monotone_in_rho", mono)
    report.record("integrable", finite)
    return report


def validate_problem(p: CoupledProblem, grid: CompactifiedGrid, probe_horizon: float = 10.0,
                     rho: float | None = None, samples_per_node: int = 1,
                     raise_on_failure: bool = True) -> list[ValidationReport]:
    """Run every sampled check on ``p``.

    Domination is checked at ``rho`` (defaults to ``max(1, |A|, |B|)``).
    Raises :class:`ProblemValidationError` on the first fatal failure unless
    ``raise_on_failure`` is false.
    """
    rho = rho if rho is not None else max(1.0, abs(p.A), abs(p.B))
    reports = [
        validate_h1(p.phi),
        validate_h1(p.psi),
        validate_h2(p.a, probe_horizon),
        validate_h2(p.b, probe_horizon),
        validate_envelope(p.f.envelope, grid, f"envelope[{p.f.label}]"),
        validate_envelope(p.h.envelope, grid, f"envelope[{p.h.label}]"),
        check_envelope_domination(p.f, rho, grid, samples_per_node),
        check_envelope_domination(p.h, rho, grid, samples_per_node),
    ]
    if raise_on_failure:
        for r in reports:
            if not r.passed:
                raise ProblemValidationError(f"{p.label}: {r.subject} failed", report=r)
    return reports


def zero_nonlinearity(label: str = "zero") -> Nonlinearity:
    def f(t, x, y, z, w):
        return np.zeros(np.broadcast(t, x, y, z, w).shape)

    def env(rho, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return Nonlinearity(f, CaratheodoryEnvelope(env), label)


def forcing_nonlinearity(g: Callable[[np.ndarray], np.ndarray], label: str = "forcing") -> Nonlinearity:
    """``f(t, ...) = g(t)`` with envelope ``|g(t)|`` (independent of ``rho``)."""

    def f(t, x, y, z, w):
        shape = np.broadcast(t, x, y, z, w).shape
        return np.broadcast_to(np.asarray(g(np.asarray(t, dtype=float)), dtype=float), shape)

    def env(rho, t):
        return np.abs(g(np.asarray(t, dtype=float)))

    return Nonlinearity(f, CaratheodoryEnvelope(env), label)


def constant_coefficient(value: float = 1.0, label: str = "a") -> CoefficientFunction:
    value = float(value)
    return CoefficientFunction(lambda t: np.full_like(np.asarray(t, dtype=float), value),
                               1.0 / value, 1.0 / value, label)
