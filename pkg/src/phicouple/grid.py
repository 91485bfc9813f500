"""Compactified grid on the real line and sampled functions on it.

The map ``t(s) = L s / (1 - s^2)`` takes ``s in (-1, 1)`` onto the whole line.
Integrals over ``t`` become proper integrals over ``s`` weighted by the
Jacobian ``dt/ds = L (1 + s^2) / (1 - s^2)^2``, evaluated with the composite
trapezoid rule on a uniform ``s`` mesh that excludes the endpoints.

Slowly decaying integrands need care at the ends: for ``g ~ |t|**(-p)`` with
``1 < p < 3`` the product ``g * jacobian`` is singular (or has a singular
slope) at ``s = +-1`` and the plain trapezoid rule degrades to order ``p - 1``.
When the last three nodes on a side agree on such an exponent, the model
``c |t|**(-p)`` is subtracted on ``|s| >= 0.5``, integrated exactly, and only
the residual goes through the trapezoid rule. Otherwise the end segment is
closed by the fitted power-law tail, or by a triangle with zero end value
when no integrable power law fits.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, NonFiniteError

DEFAULT_SCALE = 5.0
DEFAULT_NODES = 2001
# below this fitted exponent the tail is treated as not power-law integrable
_MIN_TAIL_EXPONENT = 1.05


@dataclass(frozen=True, eq=False)
class CompactifiedGrid:
    scale: float
    node_count: int
    sigma_nodes: np.ndarray
    t_nodes: np.ndarray
    jacobian: np.ndarray

    @property
    def h(self) -> float:
        """Uniform spacing in ``s``."""
        return 2.0 / (self.node_count + 1)

    @property
    def mid(self) -> int:
        return self.node_count // 2

    def zeros(self) -> np.ndarray:
        return np.zeros(self.node_count)


def sigma_to_t(sigma, scale: float):
    sigma = np.asarray(sigma, dtype=float)
    return scale * sigma / (1.0 - sigma * sigma)


def build_grid(L: float = DEFAULT_SCALE, N: int = DEFAULT_NODES) -> CompactifiedGrid:
    """Uniform grid of ``N`` interior nodes in ``s``, mapped onto the line."""
    if not (L > 0 and np.isfinite(L)):
        raise InvalidParameterError(f"scale L must be positive, got {L!r}")
    if int(N) != N or N < 3 or N % 2 == 0:
        raise InvalidParameterError(f"node count N must be an odd integer >= 3, got {N!r}")
    N = int(N)
    h = 2.0 / (N + 1)
    half = N // 2
    # build the positive half and mirror it so t(-s) = -t(s) bit-exactly
    pos = h * np.arange(1, half + 1)
    sigma = np.concatenate([-pos[::-1], [0.0], pos])
    t_pos = L * pos / (1.0 - pos * pos)
    t = np.concatenate([-t_pos[::-1], [0.0], t_pos])
    jac_pos = L * (1.0 + pos * pos) / (1.0 - pos * pos) ** 2
    jac = np.concatenate([jac_pos[::-1], [float(L)], jac_pos])
    for arr in (sigma, t, jac):
        arr.setflags(write=False)
    return CompactifiedGrid(scale=float(L), node_count=N, sigma_nodes=sigma, t_nodes=t, jacobian=jac)


def _tail(g_end: float, g_next: float, t_end: float, t_next: float, seg: float) -> float:
    """Integral of ``g`` from the outermost node to infinity.

    ``seg`` is the triangle-rule fallback ``h * g_end * jac_end / 2``.
    """
    p = _fit_exponent(g_end, g_next, t_end, t_next)
    if p is None:
        return 0.0 if g_end == 0.0 else seg
    return g_end * abs(t_end) / (p - 1.0)


def _fit_exponent(g_end: float, g_next: float, t_end: float, t_next: float) -> float | None:
    if g_end == 0.0 or g_next == 0.0 or (g_end > 0) != (g_next > 0):
        return None
    if t_next * t_end <= 0 or abs(t_next) >= abs(t_end):
        return None
    p = float(np.log(g_next / g_end) / np.log(t_end / t_next))
    if not np.isfinite(p) or p <= _MIN_TAIL_EXPONENT:
        return None
    return p


@dataclass(frozen=True)
class _TailModel:
    """``c * |t|**(-p)`` on the nodes from ``start`` outwards (one side)."""

    p: float
    c: float
    start: int

    def at(self, t):
        return self.c * np.abs(t) ** (-self.p)

    def beyond(self, t) -> np.ndarray:
        """Integral of the model from ``|t|`` out to infinity."""
        return self.c * np.abs(t) ** (1.0 - self.p) / (self.p - 1.0)


def _tail_model(g: np.ndarray, grid: CompactifiedGrid, right: bool) -> _TailModel | None:
    # only worth it when g * jacobian is singular or has a singular slope at s = +-1
    idx = np.arange(grid.node_count)
    outer = idx[grid.sigma_nodes >= _MODEL_SIGMA] if right else idx[grid.sigma_nodes <= -_MODEL_SIGMA][::-1]
    if outer.size < 4:
        return None
    e, n1, n2 = outer[-1], outer[-2], outer[-3]
    t = grid.t_nodes
    p1 = _fit_exponent(g[e], g[n1], t[e], t[n1])
    p2 = _fit_exponent(g[n1], g[n2], t[n1], t[n2])
    if p1 is None or p2 is None or not (p1 < _MODEL_MAX_EXPONENT) or abs(p1 - p2) > 1e-2 * p1:
        return None
    seg = g[outer]
    if np.any(seg == 0) or np.any(np.sign(seg) != np.sign(g[e])):
        return None
    c = float(g[e] * abs(t[e]) ** p1)
    return _TailModel(p=p1, c=c, start=int(outer[0]))


# tail-model subtraction region |s| >= 0.5 and exponents p < 3
_MODEL_SIGMA = 0.5
_MODEL_MAX_EXPONENT = 3.0


def _checked(g, grid: CompactifiedGrid) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.node_count,):
        raise InvalidParameterError(f"integrand has shape {g.shape}, expected ({grid.node_count},)")
    bad = ~np.isfinite(g)
    if bad.any():
        k = int(np.argmax(bad))
        raise NonFiniteError(f"non-finite integrand at node {k} (t={grid.t_nodes[k]:.6g})", index=k)
    return g


def _integrate(g: np.ndarray, grid: CompactifiedGrid) -> tuple[np.ndarray, float]:
    t, jac, h = grid.t_nodes, grid.jacobian, grid.h
    n = grid.node_count
    left = _tail_model(g, grid, right=False)
    right = _tail_model(g, grid, right=True)

    resid = g.copy()
    model_cum = np.zeros(n)
    if left is not None:
        k = left.start
        resid[: k + 1] -= left.at(t[: k + 1])
        model_cum[: k + 1] = left.beyond(t[: k + 1])
        model_cum[k + 1 :] = left.beyond(t[k])
    if right is not None:
        k = right.start
        resid[k:] -= right.at(t[k:])
        model_cum[k:] += right.beyond(t[k]) - right.beyond(t[k:])

    w = resid * jac
    steps = 0.5 * h * (w[:-1] + w[1:])
    # segments straddling a model boundary use the raw integrand on both ends
    if left is not None:
        k = left.start
        steps[k] = 0.5 * h * (g[k] * jac[k] + g[k + 1] * jac[k + 1])
    if right is not None:
        k = right.start
        steps[k - 1] = 0.5 * h * (g[k - 1] * jac[k - 1] + g[k] * jac[k])

    if left is not None:
        start = 0.0  # residual vanishes at the outermost node
    else:
        start = _tail(g[0], g[1], t[0], t[1], 0.5 * h * g[0] * jac[0])
    out = np.empty(n)
    out[0] = start
    out[1:] = start + np.cumsum(steps)
    out += model_cum

    if right is not None:
        total = out[-1] + right.beyond(t[-1])
    else:
        total = out[-1] + _tail(g[-1], g[-2], t[-1], t[-2], 0.5 * h * g[-1] * jac[-1])
    return out, float(total)


def cumulative_integral(g, grid: CompactifiedGrid) -> np.ndarray:
    """``F[j] = integral of g from -inf to t_j`` sampled at the nodes.

    Composite trapezoid in ``s`` with Jacobian weights, summed left to right
    in a fixed order so results are reproducible bit for bit.
    """
    return _integrate(_checked(g, grid), grid)[0]


def full_line_integral(g, grid: CompactifiedGrid) -> float:
    """Integral of ``g`` over the whole line (last cumulative value plus right tail)."""
    return _integrate(_checked(g, grid), grid)[1]


def integrate_with_limit(g, grid: CompactifiedGrid) -> tuple[np.ndarray, float]:
    """Cumulative integral at the nodes together with its value at ``+inf``."""
    return _integrate(_checked(g, grid), grid)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function in X sampled on a grid: values, t-derivatives, and limits."""

    grid: CompactifiedGrid
    values: np.ndarray
    derivative_values: np.ndarray
    left_limit: float
    right_limit: float
    left_deriv_limit: float = 0.0
    right_deriv_limit: float = 0.0

    def __post_init__(self):
        n = self.grid.node_count
        for name in ("values", "derivative_values"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise InvalidParameterError(f"{name} has shape {arr.shape}, expected ({n},)")
            object.__setattr__(self, name, arr)

    @classmethod
    def constant(cls, grid: CompactifiedGrid, c: float) -> GridFunction:
        c = float(c)
        return cls(grid, np.full(grid.node_count, c), grid.zeros(), c, c, 0.0, 0.0)

    def sup_norm(self) -> float:
        return float(max(np.max(np.abs(self.values)), abs(self.left_limit), abs(self.right_limit)))

    def deriv_sup_norm(self) -> float:
        return float(
            max(np.max(np.abs(self.derivative_values)), abs(self.left_deriv_limit), abs(self.right_deriv_limit))
        )

    def norm(self) -> float:
        """``max(||x||_inf, ||x'||_inf)`` over nodes and limits."""
        return max(self.sup_norm(), self.deriv_sup_norm())

    def is_finite(self) -> bool:
        scalars = (self.left_limit, self.right_limit, self.left_deriv_limit, self.right_deriv_limit)
        return bool(
            np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.derivative_values)) and np.all(np.isfinite(scalars))
        )

    def combine(self, other: GridFunction, alpha: float, beta: float) -> GridFunction:
        """``alpha * self + beta * other``, limits included."""
        return GridFunction(
            self.grid,
            alpha * self.values + beta * other.values,
            alpha * self.derivative_values + beta * other.derivative_values,
            alpha * self.left_limit + beta * other.left_limit,
            alpha * self.right_limit + beta * other.right_limit,
            alpha * self.left_deriv_limit + beta * other.left_deriv_limit,
            alpha * self.right_deriv_limit + beta * other.right_deriv_limit,
        )

    def scaled(self, c: float) -> GridFunction:
        return self.combine(self, c, 0.0)


@dataclass(frozen=True, eq=False)
class SolutionPair:
    u: GridFunction
    v: GridFunction
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.u.grid is not self.v.grid:
            raise InvalidParameterError("both components of a pair must share one grid")

    @property
    def grid(self) -> CompactifiedGrid:
        return self.u.grid

    @classmethod
    def constant(cls, grid: CompactifiedGrid, A: float, B: float) -> SolutionPair:
        return cls(GridFunction.constant(grid, A), GridFunction.constant(grid, B))

    def combine(self, other: SolutionPair, alpha: float, beta: float) -> SolutionPair:
        return SolutionPair(self.u.combine(other.u, alpha, beta), self.v.combine(other.v, alpha, beta))

    def is_finite(self) -> bool:
        return self.u.is_finite() and self.v.is_finite()


def pair_norm(p: SolutionPair) -> float:
    """``||(u, v)|| = max(||u||_X, ||v||_X)``."""
    return max(p.u.norm(), p.v.norm())


def pair_distance(p: SolutionPair, q: SolutionPair) -> float:
    return pair_norm(p.combine(q, 1.0, -1.0))


# --- CSV ---------------------------------------------------------------------

CSV_HEADER = ("sigma", "t", "u", "du", "v", "dv")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def pair_to_csv(p: SolutionPair) -> str:
    g = p.grid
    buf = io.StringIO()
    buf.write(f"# left: {_fmt(p.u.left_limit)},{_fmt(p.v.left_limit)}\n")
    buf.write(f"# right: {_fmt(p.u.right_limit)},{_fmt(p.v.right_limit)}\n")
    buf.write(",".join(CSV_HEADER) + "\n")
    cols = (g.sigma_nodes, g.t_nodes, p.u.values, p.u.derivative_values, p.v.values, p.v.derivative_values)
    for row in zip(*cols):
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def write_pair_csv(p: SolutionPair, path: str | Path) -> None:
    Path(path).write_text(pair_to_csv(p), encoding="ascii")


def read_pair_csv(path: str | Path, scale: float | None = None) -> SolutionPair:
    """Load a pair written by :func:`write_pair_csv`.

    The grid is rebuilt from the node count and the scale (recovered from the
    ``sigma``/``t`` columns when ``scale`` is None). Derivative limits are not
    stored in the file and are set to 0.
    """
    text = Path(path).read_text(encoding="ascii")
    limits: dict[str, tuple[float, float]] = {}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, rest = line[1:].partition(":")
            a, b = (float(x) for x in rest.split(","))
            limits[key.strip()] = (a, b)
            continue
        rows.append(line)
    reader = csv.reader(rows)
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    data = np.array([[float(x) for x in r] for r in reader])
    if "left" not in limits or "right" not in limits:
        raise ValueError("missing '# left:' or '# right:' limit line")
    if scale is None:
        mid = len(data) // 2
        s, t = data[mid + 1, 0], data[mid + 1, 1]
        scale = t * (1.0 - s * s) / s
    grid = build_grid(float(np.round(scale, 12)), len(data))
    if not np.allclose(grid.t_nodes, data[:, 1], rtol=1e-12, atol=1e-12):
        raise ValueError("CSV nodes do not match a compactified grid")
    (A, B), (ur, vr) = limits["left"], limits["right"]
    u = GridFunction(grid, data[:, 2], data[:, 3], A, ur)
    v = GridFunction(grid, data[:, 4], data[:, 5], B, vr)
    return SolutionPair(u, v)
