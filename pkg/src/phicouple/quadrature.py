"""Adaptive Simpson quadrature, used as an independent oracle for the grid.

Nothing here touches the compactified grid; the full-line variant maps each
tail ``|t| > 1`` onto ``(0, 1]`` with ``t = u**-3``, which turns algebraic
decay down to ``|t|**(-4/3)`` into a bounded integrand.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import InvalidParameterError, QuadratureError

MAX_DEPTH = 40


def _simpson(fa: float, fm: float, fb: float, a: float, b: float) -> float:
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0


def adaptive_oracle_integral(g: Callable[[float], float], t_lo: float, t_hi: float, tol: float = 1e-10,
                             max_depth: int = MAX_DEPTH) -> float:
    """Integral of ``g`` over ``[t_lo, t_hi]`` by adaptive Simpson refinement.

    Each panel is split until ``|S2 - S1| < 15 tol_panel``; the Richardson
    corrected value ``S2 + (S2 - S1)/15`` is accumulated. Panels are processed
    from an explicit stack in a fixed order, so the result is deterministic.

    Raises:
        QuadratureError: some panel reached ``max_depth``; ``partial`` holds
            the value accumulated with the unresolved panels included as-is.
    """
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    if t_lo == t_hi:
        return 0.0
    sign = 1.0
    if t_lo > t_hi:
        t_lo, t_hi, sign = t_hi, t_lo, -1.0
    fa, fb = float(g(t_lo)), float(g(t_hi))
    m = 0.5 * (t_lo + t_hi)
    fm = float(g(m))
    whole = _simpson(fa, fm, fb, t_lo, t_hi)
    stack = [(t_lo, t_hi, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    compensation = 0.0
    exhausted = False
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = float(g(lm)), float(g(rm))
        left = _simpson(fa, flm, fm, a, m)
        right = _simpson(fm, frm, fb, m, b)
        diff = left + right - whole
        if not math.isfinite(diff):
            raise QuadratureError(f"non-finite integrand on [{a}, {b}]", partial=sign * total)
        if abs(diff) <= 15.0 * eps or depth >= max_depth:
            if depth >= max_depth and abs(diff) > 15.0 * eps:
                exhausted = True
            # Kahan summation keeps panel order from mattering at 1e-16
            y = left + right + diff / 15.0 - compensation
            s = total + y
            compensation = (s - total) - y
            total = s
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    if exhausted:
        raise QuadratureError("maximum subdivision depth exceeded", partial=sign * total)
    return sign * total


def oracle_full_line_integral(g: Callable[[float], float], tol: float = 1e-10, split: float = 1.0,
                              rel_tol: float = 0.0) -> float:
    """Integral of ``g`` over the real line.

    The core ``[-split, split]`` is integrated directly; each tail is
    rewritten with ``t = split * u**-3`` as an integral over ``u in (0, 1]``.
    The integrand at ``u = 0`` is taken from a far sample (exact limit for
    ``|t|**(-4/3)`` decay, 0 for anything faster).

    With ``rel_tol > 0`` the absolute tolerance is raised to
    ``rel_tol * |crude|``, where ``crude`` is a fixed 64-panel Simpson estimate;
    this keeps large-magnitude integrals from refining forever.
    """
    if not split > 0:
        raise InvalidParameterError("split must be positive")

    def tail(direction: float) -> Callable[[float], float]:
        def mapped(u: float) -> float:
            if u <= 0.0:
                return _tail_limit(g, direction, split)
            t = direction * split * u ** -3
            return float(g(t)) * 3.0 * split * u ** -4
        return mapped

    pieces = ((g, -split, split), (tail(1.0), 0.0, 1.0), (tail(-1.0), 0.0, 1.0))
    if rel_tol > 0:
        crude = sum(_composite_simpson(fn, a, b, 64) for fn, a, b in pieces)
        tol = max(tol, rel_tol * abs(crude))
    return sum(adaptive_oracle_integral(fn, a, b, tol / 3.0) for fn, a, b in pieces)


def _composite_simpson(g: Callable[[float], float], a: float, b: float, panels: int) -> float:
    h = (b - a) / panels
    total = 0.0
    for k in range(panels):
        x0 = a + k * h
        total += _simpson(float(g(x0)), float(g(x0 + 0.5 * h)), float(g(x0 + h)), x0, x0 + h)
    return total


def _tail_limit(g: Callable[[float], float], direction: float, split: float) -> float:
    # endpoint value of the mapped integrand, estimated from a tiny u
    u = 1e-4
    t = direction * split * u ** -3
    return float(g(t)) * 3.0 * split * u ** -4
