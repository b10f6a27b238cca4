"""Command-line front end.

Every command prints a ``CommandResult`` JSON document
``{"status", "payload", "diagnostics"}`` (or a CSV projection of the payload
with ``--format csv``). ``--output PATH`` additionally writes the payload
itself, so grids and expansions can be chained between commands.

Exit codes: 0 ok, 2 invalid input, 3 incompatible right-hand side,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from .characters import character, character_complex, dimension
from .errors import GridTooCoarse, IncompatibleRHS, SORadialError
from .quadrature import (ClassFunctionGrid, QuadratureGrid, apply_radial_laplacian_grid,
                         integrate_class)
from .radial import FORMS, normalization_audit
from .solver import solve_poisson
from .torus import GroupDim
from .verify import SUITES, run_suite
from .weights import SpectralLine, enumerate_dominant

EXIT_OK, EXIT_INPUT, EXIT_RHS, EXIT_VERIFY = 0, 2, 3, 4


class CommandError(Exception):
    def __init__(self, code, message, payload=None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def parse_n_range(text: str) -> list[int]:
    """``"5"``, ``"3,4,6"`` or ``"3..7"``."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return list(parse_ints(text))


def _group(args) -> GroupDim:
    if args.n is None:
        raise CommandError(EXIT_INPUT, "--n is required")
    ns = parse_n_range(args.n)
    if len(ns) != 1:
        raise CommandError(EXIT_INPUT, "this command takes a single --n")
    return GroupDim(ns[0])


def _density_diagnostics(group: GroupDim) -> list[str]:
    msg = normalization_audit(group)["diagnostic"]
    return [msg] if msg else []


def _load_grid(args, group: GroupDim | None = None) -> ClassFunctionGrid:
    if not args.input:
        raise CommandError(EXIT_INPUT, "--input grid file is required")
    text = sys.stdin.read() if args.input == "-" else open(args.input).read()
    try:
        grid = ClassFunctionGrid.from_dict(json.loads(text))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise CommandError(EXIT_INPUT, f"grid file does not match schema: {exc}") from exc
    if group is not None and grid.group != group:
        raise CommandError(EXIT_INPUT, f"grid is for n = {grid.group.n}, --n says {group.n}")
    return grid


def _line_row(line: SpectralLine) -> dict:
    return {"lambda": list(line.lam), "kappa": _number(line.kappa_exact), "dim": line.dim}


# -- commands -------------------------------------------------------------------

def cmd_spectrum(args):
    group = _group(args)
    rows = [_line_row(line) for line in enumerate_dominant(group, args.kappa_max)]
    return {"n": group.n, "kappa_max": args.kappa_max, "rows": rows}, []


def cmd_character(args):
    group = _group(args)
    if args.weight is None or args.theta is None:
        raise CommandError(EXIT_INPUT, "--weight and --theta are required")
    lam, theta = parse_ints(args.weight), parse_floats(args.theta)
    if len(theta) != group.p:
        raise CommandError(EXIT_INPUT, f"need {group.p} angles, got {len(theta)}")
    line = SpectralLine.from_weight(group, lam)
    value = float(character(line, np.array(theta)))
    payload = {"n": group.n, "lambda": list(line.lam), "theta": list(theta),
               "value": value, "kappa": _number(line.kappa_exact), "dim": dimension(line)}
    if not line.is_real:
        z = complex(character_complex(line, np.array(theta)))
        payload["chi_real"], payload["chi_imag"] = z.real, z.imag
    return payload, []


def cmd_sample(args):
    group = _group(args)
    if args.weight is None:
        raise CommandError(EXIT_INPUT, "--weight is required")
    line = SpectralLine.from_weight(group, parse_ints(args.weight))
    grid = QuadratureGrid(group, args.grid) if args.grid else QuadratureGrid.default(group)
    values = character(line, grid.points) ** args.power
    return {"n": group.n, "N": grid.N, "values": [float(v) for v in values]}, []


def cmd_apply_l(args):
    f = _load_grid(args)
    out = apply_radial_laplacian_grid(f, args.form)
    values = [None if not np.isfinite(v) else float(v) for v in out]
    diags = _density_diagnostics(f.group)
    nulls = sum(v is None for v in values)
    if nulls:
        diags.append(f"{nulls} singular nodes written as null")
    return {"n": f.group.n, "N": f.grid.N, "form": args.form, "values": values}, diags


def cmd_solve(args):
    eta = _load_grid(args)
    sol = solve_poisson(eta, args.kappa_max)
    diags = _density_diagnostics(eta.group)
    if sol.residual_norm > 1e-10:
        diags.append(f"truncation residual {sol.residual_norm:.6e} outside kappa <= {args.kappa_max}")
    payload = sol.to_dict()
    payload["residual_norm"] = sol.residual_norm
    return payload, diags


def cmd_integrate(args):
    f = _load_grid(args)
    return {"n": f.group.n, "N": f.grid.N, "integral": integrate_class(f)}, _density_diagnostics(f.group)


def cmd_verify(args):
    ns = parse_n_range(args.n) if args.n else [3, 4, 5]
    results = run_suite(args.suite, ns, seed=args.seed)
    passed = all(r.passed for r in results)
    diags = [m for n in ns for m in _density_diagnostics(GroupDim(n))]
    payload = {
        "suite": args.suite,
        "n": ns,
        "seed": args.seed,
        "passed": passed,
        "max_residual": max((r.residual for r in results if r.name != "fonda_negative"), default=0.0),
        "results": [r.to_dict() for r in results],
    }
    if not passed:
        raise CommandError(EXIT_VERIFY, "verification failed", payload)
    return payload, diags


COMMANDS = {
    "spectrum": cmd_spectrum,
    "character": cmd_character,
    "sample": cmd_sample,
    "apply-L": cmd_apply_l,
    "solve": cmd_solve,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
}


# -- output ---------------------------------------------------------------------

def _csv(command: str, payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "spectrum":
        w.writerow(["lambda", "kappa", "dim"])
        for r in payload["rows"]:
            w.writerow([" ".join(map(str, r["lambda"])), r["kappa"], r["dim"]])
    elif command in ("apply-L", "sample"):
        w.writerow(["index", "value"])
        for i, v in enumerate(payload["values"]):
            w.writerow([i, "" if v is None else repr(v)])
    elif command == "solve":
        w.writerow(["lambda", "kappa", "coeff"])
        for t in payload["terms"]:
            w.writerow([" ".join(map(str, t["lambda"])), t["kappa"], repr(t["coeff"])])
    elif command == "verify":
        w.writerow(["criterion", "n", "residual", "tolerance", "passed"])
        for r in payload["results"]:
            w.writerow([r["name"], r["n"], repr(r["residual"]), r["tolerance"], r["passed"]])
    else:
        w.writerow(["key", "value"])
        for k, v in payload.items():
            w.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
    return buf.getvalue()


def _render(command, fmt, payload):
    if fmt == "csv":
        return _csv(command, payload)
    return json.dumps(payload)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", default=argparse.SUPPRESS, help="group dimension, or a range like 3..5 for verify")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS, help="grid size N")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--output", default=argparse.SUPPRESS, help="also write the payload here")
    common.add_argument("--input", default=argparse.SUPPRESS, help="ClassFunctionGrid JSON file ('-' for stdin)")
    common.add_argument("--weight", default=argparse.SUPPRESS, help="comma-separated integers")
    common.add_argument("--theta", default=argparse.SUPPRESS, help="comma-separated radians")

    parser = argparse.ArgumentParser(prog="soradial", parents=[common],
                                     description="Radial Laplacian and spectral tools for SO(n).")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("spectrum", parents=[common], help="dominant weights, eigenvalues, dimensions")
    p.add_argument("--kappa-max", type=float, default=10.0)
    sub.add_parser("character", parents=[common], help="evaluate phi_lambda at torus angles")
    p = sub.add_parser("sample", parents=[common], help="write phi_lambda^power on a grid")
    p.add_argument("--power", type=int, default=1)
    p = sub.add_parser("apply-L", parents=[common], help="apply the radial Laplacian to a grid")
    p.add_argument("--form", choices=FORMS, default="direct")
    p = sub.add_parser("solve", parents=[common], help="spectral Poisson solve -L phi = eta")
    p.add_argument("--kappa-max", type=float, default=30.0)
    sub.add_parser("integrate", parents=[common], help="Haar integral of a class function grid")
    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    return parser


DEFAULTS = {"n": None, "seed": 0, "grid": None, "format": "json", "output": None,
            "input": None, "weight": None, "theta": None}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, value in DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    status, code, diags = "ok", EXIT_OK, []
    try:
        payload, diags = COMMANDS[args.command](args)
    except CommandError as exc:
        status, code = "error", exc.code
        payload = exc.payload if exc.payload is not None else {"error": str(exc)}
        if exc.payload is not None:
            diags = [str(exc)]
    except IncompatibleRHS as exc:
        status, code, payload = "error", EXIT_RHS, {"error": type(exc).__name__, "message": str(exc)}
    except (SORadialError, GridTooCoarse, ValueError, OSError) as exc:
        status, code, payload = "error", EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)}

    if args.output and status == "ok":
        with open(args.output, "w") as fh:
            fh.write(_render(args.command, args.format, payload))
    if args.format == "csv" and status == "ok":
        sys.stdout.write(_csv(args.command, payload))
    else:
        sys.stdout.write(json.dumps({"status": status, "payload": payload, "diagnostics": diags}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
