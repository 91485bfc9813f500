"""``phicouple`` command-line front end.

Exit status: 0 success, 1 validation failure, 2 non-convergence, 3 I/O failure.
Failures print one line ``phicouple: status=<n> kind=<kind> reason=<json string>``
on standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .admissibility import evaluate_conditions, rho_min
from .config import RunConfig, build_run_config, load_config, resolve_problem
from .dof2 import PRESET_NAME
from .errors import NonFiniteError, PhiCoupleError
from .grid import build_grid, read_pair_csv, write_pair_csv
from .problem import validate_problem
from .solver import SolverConfig, solve, verify_solution

EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGENCE, EXIT_IO = 0, 1, 2, 3
_KINDS = {EXIT_VALIDATION: "validation", EXIT_NONCONVERGENCE: "non-convergence", EXIT_IO: "io"}


class CliFailure(Exception):
    def __init__(self, status: int, reason: str):
        super().__init__(reason)
        self.status = status
        self.reason = reason


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def to_json(obj) -> str:
    """JSON with every float at 17 significant digits (non-finite values as strings)."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else json.dumps(str(obj))
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(str(obj))


def aligned(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {fmt(v)}" for k, v in rows)


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="ascii")
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _validate(problem, grid) -> None:
    for r in validate_problem(problem, grid, raise_on_failure=False):
        if not r.passed:
            raise CliFailure(EXIT_VALIDATION, f"{r.subject} failed: {r.summary()}")


def plot_script(csv_name: str, label: str) -> str:
    return "\n".join([
        f"# u(t) and v(t) for {label}",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        "set xlabel 't'",
        "set xrange [-20:20]",
        "set grid",
        "set multiplot layout 2,1",
        "set ylabel 'u'",
        f"plot '{csv_name}' using 2:3 with lines title 'u(t)'",
        "set ylabel 'v'",
        f"plot '{csv_name}' using 2:5 with lines title 'v(t)'",
        "unset multiplot",
        "",
    ])


def cmd_check(cfg: RunConfig, problem, grid, out) -> int:
    _validate(problem, grid)
    rep = evaluate_conditions(problem, cfg.rho, grid)
    d = rep.as_dict()
    rows = [(k, v) for k, v in d.items() if k != "notes"] + [("note", n) for n in rep.notes]
    print(aligned(rows), file=out)
    summary = {"command": "check", "preset": problem.label, **{k: v for k, v in d.items() if k != "notes"}}
    print("summary " + to_json(summary), file=out)
    _write(Path(cfg.output) / "report.json", to_json(d) + "\n")
    return EXIT_OK


def cmd_rho_min(cfg: RunConfig, problem, grid, out) -> int:
    res = rho_min(problem, grid, cfg.bracket_hi, cfg.rho_tol)
    if not res.found:
        print(aligned([("found", False), ("reason", res.message)]), file=out)
        return EXIT_OK
    r = res.report
    rows = [
        ("rho_min", res.rho),
        ("margin_phi", r.margin_phi),
        ("margin_psi", r.margin_psi),
        ("integral_phi_side", r.integral_phi_side),
        ("integral_psi_side", r.integral_psi_side),
        ("monotone", res.monotone),
        ("evaluations", res.evaluations),
    ]
    print(aligned(rows), file=out)
    print("summary " + to_json(dict(rows)), file=out)
    return EXIT_OK


def cmd_solve(cfg: RunConfig, problem, grid, out) -> int:
    _validate(problem, grid)
    scfg = SolverConfig(damping=cfg.damping, tol=cfg.tol, max_iter=cfg.max_iter, L=cfg.L, N=cfg.N,
                        tol_class=cfg.tol_class)
    try:
        rep = solve(problem, scfg, grid)
    except NonFiniteError as exc:
        raise CliFailure(EXIT_NONCONVERGENCE, f"non-finite iterate: {exc}") from exc
    outdir = Path(cfg.output)
    csv_path = outdir / "solution.csv"
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        write_pair_csv(rep.solution, csv_path)
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot write {csv_path}: {exc}") from exc
    text = rep.summary()
    _write(outdir / "report.txt", text + "\n")
    _write(outdir / "plot.gp", plot_script(csv_path.name, problem.label))
    print(text, file=out)
    if not rep.converged:
        last = rep.residual_history[-1] if rep.residual_history else float("nan")
        raise CliFailure(EXIT_NONCONVERGENCE,
                         f"no convergence after {rep.iterations} iterations (residual {fmt(last)})")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, problem, out) -> int:
    try:
        pair = read_pair_csv(cfg.input)
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read {cfg.input}: {exc}") from exc
    except ValueError as exc:
        raise CliFailure(EXIT_IO, f"malformed solution file {cfg.input}: {exc}") from exc
    residual = verify_solution(problem, pair)
    scale = max(pair.u.sup_norm(), pair.v.sup_norm())
    bound = 10.0 * cfg.tol * (1.0 + scale)
    ok = residual <= bound
    print(aligned([("ode_residual", residual), ("bound", bound), ("ok", ok)]), file=out)
    if not ok:
        raise CliFailure(EXIT_VALIDATION, f"ode residual {fmt(residual)} exceeds {fmt(bound)}")
    return EXIT_OK


def run(cfg: RunConfig, out=None) -> int:
    """Execute one command; raises :class:`CliFailure` on a classified failure."""
    out = out or sys.stdout
    try:
        problem = resolve_problem(cfg)
    except (PhiCoupleError, ValueError) as exc:
        raise CliFailure(EXIT_VALIDATION, f"bad problem definition: {exc}") from exc
    if cfg.command == "verify":
        return cmd_verify(cfg, problem, out)
    try:
        grid = build_grid(cfg.L, cfg.N)
    except (PhiCoupleError, ValueError) as exc:
        raise CliFailure(EXIT_VALIDATION, str(exc)) from exc
    handler = {"check": cmd_check, "rho-min": cmd_rho_min, "solve": cmd_solve}[cfg.command]
    return handler(cfg, problem, grid, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phicouple", description="Coupled phi-Laplacian connecting orbits on R.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "rho-min", "solve", "verify"):
        sp = sub.add_parser(name)
        sp.add_argument("--preset", help=f"named problem ({PRESET_NAME})")
        sp.add_argument("--config", help="key = value problem/run file")
        sp.add_argument("--L", type=float)
        sp.add_argument("--N", type=int)
        sp.add_argument("--A", type=float)
        sp.add_argument("--B", type=float)
        sp.add_argument("--output", "-o", help="output directory (default: .)")
        if name == "check":
            sp.add_argument("--rho", type=float)
        if name == "rho-min":
            sp.add_argument("--bracket-hi", dest="bracket_hi", type=float)
            sp.add_argument("--rho-tol", dest="rho_tol", type=float)
        if name in ("solve", "verify"):
            sp.add_argument("--tol", type=float)
        if name == "solve":
            sp.add_argument("--damping", type=float)
            sp.add_argument("--max-iter", dest="max_iter", type=int)
            sp.add_argument("--tol-class", dest="tol_class", type=float)
        if name == "verify":
            sp.add_argument("--input")
    return parser


def _fail(status: int, reason: str) -> int:
    print(f"phicouple: status={status} kind={_KINDS[status]} reason={json.dumps(reason)}", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = load_config(args.config) if args.config else {}
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read config {args.config}: {exc}")
    except PhiCoupleError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    try:
        cfg = build_run_config(args.command, file_values, overrides)
    except (PhiCoupleError, ValueError) as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    try:
        return run(cfg)
    except CliFailure as exc:
        return _fail(exc.status, exc.reason)
    except PhiCoupleError as exc:
        return _fail(EXIT_VALIDATION, str(exc))


if __name__ == "__main__":
    sys.exit(main())
