"""Increasing homeomorphisms of the real line and their (H1) check.

A :class:`Homeomorphism` is a pair of vectorised callables (forward map and its
inverse). Both must accept scalars and numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidParameterError
from .validation import ValidationReport

ArrayFunc = Callable[[np.ndarray], np.ndarray]

# Geometric sampling ladder: +-10**k, no randomness.
LADDER_EXPONENTS = (-6, -4, -2, 0, 1, 2, 4, 6)


@dataclass(frozen=True)
class Homeomorphism:
    forward: ArrayFunc
    inverse: ArrayFunc
    label: str = "phi"

    def __call__(self, z):
        return self.forward(z)


def make_power_homeomorphism(p: float) -> Homeomorphism:
    """Odd power map ``z -> sign(z) |z|**p`` for an exponent ``p > 1``."""
    p = float(p)
    if not np.isfinite(p) or p <= 1.0:
        raise InvalidParameterError(f"invalid exponent p={p!r}: need p > 1")

    if p == 3.0:
        # cbrt is correctly rounded; |x|**(1/3) is not
        def inverse(x):
            return np.cbrt(x)

        def forward(z):
            z = np.asarray(z, dtype=float)
            return z * z * z
    else:
        q = 1.0 / p

        def forward(z):
            z = np.asarray(z, dtype=float)
            return np.sign(z) * np.abs(z) ** p

        def inverse(x):
            x = np.asarray(x, dtype=float)
            return np.sign(x) * np.abs(x) ** q

    label = f"power(p={p:g})"
    return Homeomorphism(forward=forward, inverse=inverse, label=label)


def identity_homeomorphism() -> Homeomorphism:
    """``z -> z``; the linear (classical Laplacian) case."""

    def ident(z):
        return np.asarray(z, dtype=float) * 1.0

    return Homeomorphism(forward=ident, inverse=ident, label="identity")


def make_linear_cubic_homeomorphism(c: float = 1.0) -> Homeomorphism:
    """``z -> z + c z**3`` for ``c >= 0``.

    Unlike pure powers its inverse is Lipschitz at 0, which keeps rounding
    noise in near-zero fluxes from being amplified. The inverse uses the
    hyperbolic form of the depressed-cubic root, accurate for tiny ``x``.
    """
    c = float(c)
    if not np.isfinite(c) or c < 0:
        raise InvalidParameterError(f"cubic coefficient must be >= 0, got {c!r}")
    if c == 0.0:
        return identity_homeomorphism()
    k = 2.0 / np.sqrt(3.0 * c)
    m = 1.5 * np.sqrt(3.0 * c)

    def forward(z):
        z = np.asarray(z, dtype=float)
        return z + c * z * z * z

    def inverse(x):
        x = np.asarray(x, dtype=float)
        return k * np.sinh(np.arcsinh(m * x) / 3.0)

    return Homeomorphism(forward=forward, inverse=inverse, label=f"z+{c:g}z^3")


def sample_points(sample_count: int) -> np.ndarray:
    """Deterministic symmetric sample set: the fixed ladder plus a geometric fill."""
    ladder = np.array([10.0**k for k in LADDER_EXPONENTS])
    fill = np.geomspace(1e-6, 1e6, sample_count)
    pos = np.unique(np.concatenate([ladder, fill]))
    return np.concatenate([-pos[::-1], [0.0], pos])


def _safe(fn: ArrayFunc, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        try:
            return np.asarray(fn(x), dtype=float) * np.ones_like(x)
        except (ArithmeticError, ValueError, TypeError):
            return np.full_like(x, np.nan)


def validate_h1(h: Homeomorphism, sample_count: int = 8) -> ValidationReport:
    """Sample the (H1) conditions for ``h``.

    Checks zero at zero, strict monotonicity, inverse round trip and
    ``|inv(x)| <= inv(|x|)``. Never raises on bad callables: a non-finite
    value is a failed check with its sample as witness.
    """
    if sample_count < 8:
        raise InvalidParameterError("sample_count must be >= 8")
    report = ValidationReport(subject=f"H1[{h.label}]")
    z = sample_points(sample_count)

    zero = np.array([0.0])
    f0, i0 = _safe(h.forward, zero)[0], _safe(h.inverse, zero)[0]
    report.record("zero_at_zero", f0 == 0.0 and i0 == 0.0, witness=(f0, i0))

    fz = _safe(h.forward, z)
    bad = ~np.isfinite(fz)
    if bad.any():
        k = int(np.argmax(bad))
        report.record("monotone", False, witness=("non-finite", float(z[k])))
    else:
        dec = np.diff(fz) <= 0
        if dec.any():
            k = int(np.argmax(dec))
            report.record("monotone", False, witness=(float(z[k]), float(z[k + 1])))
        else:
            report.record("monotone", True)

    back = _safe(h.inverse, fz)
    tol = np.maximum(1e-10 * np.abs(z), 1e-12)
    err = np.abs(back - z)
    viol = ~(err <= tol)  # catches NaN
    if viol.any():
        k = int(np.argmax(viol))
        report.record("inverse_consistency", False, witness=float(z[k]))
    else:
        report.record("inverse_consistency", True)

    # (H1)(b) is sampled in the image space
    ix = _safe(h.inverse, z)
    iabs = _safe(h.inverse, np.abs(z))
    slack = 1e-14 * np.abs(iabs)
    viol = ~(np.abs(ix) <= iabs + slack)
    if viol.any():
        k = int(np.argmax(viol))
        report.record("inverse_abs_bound", False, witness=float(z[k]))
    else:
        report.record("inverse_abs_bound", True)
    return report
