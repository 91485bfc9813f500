"""Flat ``key = value`` run configuration and the user-problem catalog.

Example file::

    # zero forcing between power-law fluxes
    phi = power:3
    psi = linear-cubic:1
    a_num = 1, 0, 0, 0, 1      # 1 + t^4, ascending coefficients
    b_num = 2
    f_weight_num = 0, 0, 0, 0, 1
    f_weight_den = 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1
    f_terms = 0.001:3,0,0,0; -0.002:1,1,0,0
    f_cos = 1
    A = 10
    B = 8
    N = 2001

User problems are limited to power / linear-cubic homeomorphisms, rational
coefficients, and nonlinearities of the form
``w(t) * (sum_k c_k x^i y^j z^l w^m + c_cos cos t)`` with a rational weight ``w``.
Envelopes are generated from the same data.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.polynomial import polynomial as P

from .dof2 import PRESET_NAME, dof2_problem
from .errors import InvalidParameterError
from .homeo import Homeomorphism, identity_homeomorphism, make_linear_cubic_homeomorphism, make_power_homeomorphism
from .problem import CaratheodoryEnvelope, CoefficientFunction, CoupledProblem, Nonlinearity

COMMANDS = ("check", "rho-min", "solve", "verify")

# key -> parser for the scalar run settings
_SCALARS = {
    "L": float,
    "N": int,
    "damping": float,
    "tol": float,
    "max_iter": int,
    "tol_class": float,
    "rho": float,
    "bracket_hi": float,
    "rho_tol": float,
    "A": float,
    "B": float,
}

PROBLEM_KEYS = {
    "phi", "psi", "a_num", "a_den", "b_num", "b_den",
    "f_weight_num", "f_weight_den", "f_terms", "f_cos",
    "h_weight_num", "h_weight_den", "h_terms", "h_cos",
}


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParameterError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        if key not in _SCALARS and key not in PROBLEM_KEYS and key not in ("preset", "output", "input"):
            raise InvalidParameterError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


@dataclass
class RunConfig:
    command: str
    preset: str | None = None
    problem_fields: dict[str, str] | None = None
    L: float = 5.0
    N: int = 2001
    damping: float = 0.5
    tol: float = 1e-8
    max_iter: int = 200
    tol_class: float = 1e-6
    rho: float | None = None
    bracket_hi: float = 1e6
    rho_tol: float = 1e-6
    A: float | None = None
    B: float | None = None
    output: str = "."
    input: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidParameterError(f"unknown command {self.command!r}")
        if self.preset is None and not self.problem_fields:
            raise InvalidParameterError("a preset or a problem definition is required")
        if self.preset is not None and self.preset != PRESET_NAME:
            raise InvalidParameterError(f"unknown preset {self.preset!r} (available: {PRESET_NAME})")
        if self.command == "check" and (self.rho is None or not self.rho > 0):
            raise InvalidParameterError("check needs a positive --rho")
        if self.command == "verify" and not self.input:
            raise InvalidParameterError("verify needs --input")


def build_run_config(command: str, file_values: dict[str, str], overrides: dict[str, Any]) -> RunConfig:
    """Merge config-file values with CLI overrides (overrides win)."""
    kwargs: dict[str, Any] = {"command": command}
    problem = {k: v for k, v in file_values.items() if k in PROBLEM_KEYS}
    for key, value in file_values.items():
        if key in _SCALARS:
            try:
                kwargs[key] = _SCALARS[key](value)
            except ValueError as exc:
                raise InvalidParameterError(f"bad value for {key}: {value!r}") from exc
        elif key in ("preset", "output", "input"):
            kwargs[key] = value
    for key, value in overrides.items():
        if value is not None:
            kwargs[key] = value
    kwargs["problem_fields"] = problem or None
    return RunConfig(**kwargs)


def _floats(text: str) -> np.ndarray:
    vals = [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    if not vals:
        raise InvalidParameterError(f"empty coefficient list {text!r}")
    return np.array(vals)


def parse_homeomorphism(spec: str) -> Homeomorphism:
    kind, _, arg = spec.partition(":")
    kind = kind.strip()
    if kind == "power":
        return make_power_homeomorphism(float(arg))
    if kind == "linear-cubic":
        return make_linear_cubic_homeomorphism(float(arg) if arg else 1.0)
    if kind == "identity":
        return identity_homeomorphism()
    raise InvalidParameterError(f"unknown homeomorphism {spec!r}")


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise InvalidParameterError("polynomial is identically zero")
    return c[: nz[-1] + 1]


def rational_coefficient(num: np.ndarray, den: np.ndarray, label: str) -> CoefficientFunction:
    """``a = num/den`` with ``lim 1/a`` read off the degrees."""
    num, den = _trim(num), _trim(den)
    dn, dd = len(num) - 1, len(den) - 1
    if dn > dd:
        lim_left = lim_right = 0.0
    elif dn == dd:
        lim_left = lim_right = float(den[-1] / num[-1])
    else:
        raise InvalidParameterError(f"{label}: 1/a is unbounded at infinity (degree of numerator < denominator)")

    def a(t):
        t = np.asarray(t, dtype=float)
        return P.polyval(t, num) / P.polyval(t, den)

    return CoefficientFunction(a, lim_left, lim_right, label)


def parse_terms(text: str) -> list[tuple[float, tuple[int, int, int, int]]]:
    terms = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coef, _, powers = chunk.partition(":")
        exps = tuple(int(x) for x in powers.split(","))
        if len(exps) != 4 or min(exps) < 0:
            raise InvalidParameterError(f"term {chunk!r}: need four nonnegative exponents")
        terms.append((float(coef), exps))
    return terms


def polynomial_cosine_nonlinearity(weight_num: np.ndarray, weight_den: np.ndarray,
                                   terms: list[tuple[float, tuple[int, int, int, int]]], cos_coef: float,
                                   label: str) -> Nonlinearity:
    """``w(t) (sum c x^i y^j z^k w^l + c_cos cos t)`` with envelope
    ``|w(t)| (sum |c| rho^(i+j+k+l) + |c_cos|)``."""
    weight_den = _trim(weight_den)

    def weight(t):
        t = np.asarray(t, dtype=float)
        return P.polyval(t, weight_num) / P.polyval(t, weight_den)

    def f(t, x, y, z, w):
        acc = cos_coef * np.cos(t)
        for c, (i, j, k, m) in terms:
            acc = acc + c * x**i * y**j * z**k * w**m
        return weight(t) * acc

    def env(rho, t):
        bound = abs(cos_coef) + sum(abs(c) * rho ** sum(e) for c, e in terms)
        return np.abs(weight(t)) * bound

    return Nonlinearity(f, CaratheodoryEnvelope(env), label)


def problem_from_fields(fields: dict[str, str], A: float, B: float) -> CoupledProblem:
    def get(key, default):
        return fields.get(key, default)

    phi = parse_homeomorphism(get("phi", "power:3"))
    psi = parse_homeomorphism(get("psi", "power:3"))
    a = rational_coefficient(_floats(get("a_num", "1")), _floats(get("a_den", "1")), "a")
    b = rational_coefficient(_floats(get("b_num", "1")), _floats(get("b_den", "1")), "b")
    nonlin = []
    for side in ("f", "h"):
        nonlin.append(polynomial_cosine_nonlinearity(
            _floats(get(f"{side}_weight_num", "0")),
            _floats(get(f"{side}_weight_den", "1")),
            parse_terms(get(f"{side}_terms", "")),
            float(get(f"{side}_cos", "0")),
            side,
        ))
    return CoupledProblem(phi, psi, a, b, nonlin[0], nonlin[1], float(A), float(B), label="user")


def resolve_problem(cfg: RunConfig) -> CoupledProblem:
    if cfg.preset == PRESET_NAME:
        return dof2_problem(cfg.A, cfg.B)
    return problem_from_fields(cfg.problem_fields or {}, cfg.A if cfg.A is not None else 0.0,
                               cfg.B if cfg.B is not None else 0.0)
