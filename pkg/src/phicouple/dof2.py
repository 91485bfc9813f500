"""Coupled nonlinear two-degree-of-freedom oscillator preset.

    ((1+t^4) (q1')^3)'       = w(t) [2 zeta w0 (q1')^3 + w0^2 q1 + gamma (q1^3 - 3 d^2 q1 q2) + cos t]
    tau^2 ((1+t^4) (q2')^3)' = w(t) [2 zeta w0 (q2')^3 + w0^2 q2 + gamma (d^2 q2^3 - 3 q1^2 q2)]

with ``w(t) = t^4 / (1 + t^6)^2``. The ``tau^2`` on the left of the second
equation is folded into ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .homeo import make_power_homeomorphism
from .problem import CaratheodoryEnvelope, CoefficientFunction, CoupledProblem, Nonlinearity

PRESET_NAME = "dof2-paper"


@dataclass(frozen=True)
class Dof2Params:
    zeta: float
    omega0: float
    gamma: float
    d: float
    tau: float

    def __post_init__(self):
        for name in ("gamma", "d", "tau"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise InvalidParameterError(f"{name} must be a positive constant, got {val!r}")
        for name in ("zeta", "omega0"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")


def dof2_parameter_set() -> tuple[Dof2Params, float, float]:
    """Parameter set with the threshold near 6.3542 and boundary data A=10, B=8."""
    params = Dof2Params(
        zeta=1.0 / (2.0 * math.sqrt(1000.0)),
        omega0=1.0 / math.sqrt(1000.0),
        gamma=1.0 / 1000.0,
        d=1.0 / math.sqrt(3000.0),
        tau=23.0,
    )
    return params, 10.0, 8.0


def weight(t):
    t = np.asarray(t, dtype=float)
    t2 = t * t
    return t2 * t2 / (1.0 + t2 * t2 * t2) ** 2


def phi_envelope_constant(params: Dof2Params, rho: float) -> float:
    """Bracket bound for ``|f| / w(t)`` on ``[-rho, rho]^4``."""
    zw = abs(params.zeta * params.omega0)
    d2 = params.d ** 2
    return 2 * zw * rho**3 + params.omega0**2 * rho + params.gamma * rho**3 + 3 * d2 * rho**2 + 1.0


def psi_envelope_constant(params: Dof2Params, rho: float) -> float:
    """Bracket bound for ``tau^2 |h| / w(t)`` on ``[-rho, rho]^4``."""
    zw = abs(params.zeta * params.omega0)
    d2 = params.d ** 2
    return 2 * zw * rho**3 + params.omega0**2 * rho + params.gamma * d2 * rho**3 + 3 * rho**3


def build_dof2_problem(params: Dof2Params, A: float, B: float) -> CoupledProblem:
    zeta, w0, gamma, tau = params.zeta, params.omega0, params.gamma, params.tau
    d2 = params.d ** 2
    tau2 = tau * tau
    cube = make_power_homeomorphism(3)

    def f(t, x, y, z, w):
        return weight(t) * (2 * zeta * w0 * z**3 + w0**2 * x + gamma * (x**3 - 3 * d2 * x * y) + np.cos(t))

    def h(t, x, y, z, w):
        return weight(t) / tau2 * (2 * zeta * w0 * w**3 + w0**2 * y + gamma * (d2 * y**3 - 3 * x**2 * y))

    def delta(rho, t):
        return weight(t) * phi_envelope_constant(params, rho)

    def epsilon(rho, t):
        return weight(t) / tau2 * psi_envelope_constant(params, rho)

    def a(t):
        t = np.asarray(t, dtype=float)
        t2 = t * t
        return 1.0 + t2 * t2

    coeff = CoefficientFunction(a, 0.0, 0.0, "1+t^4")
    return CoupledProblem(
        phi=cube,
        psi=cube,
        a=coeff,
        b=CoefficientFunction(a, 0.0, 0.0, "1+t^4"),
        f=Nonlinearity(f, CaratheodoryEnvelope(delta), "f_dof2"),
        h=Nonlinearity(h, CaratheodoryEnvelope(epsilon), "h_dof2"),
        A=float(A),
        B=float(B),
        label=PRESET_NAME,
        notes=("|A|, |B| do not enter the feasibility inequalities for this model",),
    )


def dof2_problem(A: float | None = None, B: float | None = None) -> CoupledProblem:
    params, A0, B0 = dof2_parameter_set()
    return build_dof2_problem(params, A0 if A is None else A, B0 if B is None else B)
