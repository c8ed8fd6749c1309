"""Command-line entry point: ``expbounds {bounds,verify,identity,gauss}``.

JSON goes to stdout (CSV for ``gauss sweep``); errors go to stderr as a JSON
object. Exit codes: 0 success, 1 failed check, 2 invalid input, 3 precision
exhausted.

Node lists are comma separated (``--x 0,1,2``; use ``--x=-1,0,1`` when the
list starts with a minus sign) or read from a file with ``--x-file`` (one
number per line, ``#`` starts a comment).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

from . import __version__
from .errors import InvalidInput, PositivityViolated, PrecisionExhausted
from .expdet import ExpMatrixSpec, hadamard_log_upper, logdet_exp_with_tol, theorem_bounds
from .gaussrbf import (
    GaussianModel,
    evaluate,
    gaussian_bounds,
    geometric_grid,
    interpolate,
    logdet_gaussian,
    pair_count,
    resolve_lambda,
    select_shape,
    sweep,
)
from .highprec import PrecisionConfig
from .nodes import centered_moments, sorted_nodes, validate_nodes
from .quadcheck import QuadratureConfig, check_corollary_identity, check_lemma1_reduction, check_theorem_identity
from .verify import VerifySettings, run_verify

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3

COROLLARY_TOL = 1e-10
THEOREM_TOL = 1e-8
REDUCTION_TOL = 1e-8
# The identity command keeps tensor grids at most 3-dimensional.
IDENTITY_MAX_DIMS = 3
REPRESENTABLE_LOG = 700.0


class UsageError(InvalidInput):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        _emit_error("UsageError", message)
        sys.exit(EXIT_INPUT)


def _emit_error(kind: str, message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")


def parse_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def read_node_file(path: str) -> list[float]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                try:
                    out.append(float(line))
                except ValueError as exc:
                    raise UsageError(f"{path}: cannot parse {line!r}") from exc
    return out


def _nodes_arg(args, name: str, required: bool = True) -> list[float] | None:
    inline = getattr(args, name)
    path = getattr(args, f"{name}_file")
    if inline is not None and path is not None:
        raise UsageError(f"give either --{name} or --{name}-file, not both")
    if path is not None:
        return read_node_file(path)
    if inline is not None:
        return parse_list(inline)
    if required:
        raise UsageError(f"--{name} or --{name}-file is required")
    return None


def _precision(args) -> PrecisionConfig:
    bits = args.precision
    if bits is None:
        env = os.environ.get("EXPDET_PREC")
        bits = 256
        if env:
            try:
                bits = int(env)
            except ValueError as exc:
                raise UsageError(f"EXPDET_PREC must be an integer, got {env!r}") from exc
    try:
        return PrecisionConfig(mantissa_bits=bits)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _representable(log_value: float) -> float | None:
    return math.exp(log_value) if abs(log_value) < REPRESENTABLE_LOG else None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def cmd_bounds(args) -> int:
    cfg = _precision(args)
    x = validate_nodes(_nodes_arg(args, "x"))
    y = validate_nodes(_nodes_arg(args, "y"))
    spec = ExpMatrixSpec(x, y)
    bounds = theorem_bounds(spec)
    hada = hadamard_log_upper(spec)
    det, tol = logdet_exp_with_tol(spec, cfg)
    log_det = det.log_abs
    report = {
        "command": "bounds",
        "input": {"x": x.tolist(), "y": y.tolist(), "precision_bits": cfg.mantissa_bits},
        "n": spec.n,
        "log_lower": bounds.log_lower,
        "log_det": log_det,
        "log_upper": bounds.log_upper,
        "log_hadamard": hada,
        "log_effective_upper": min(bounds.log_upper, hada),
        "lower_gap": log_det - bounds.log_lower,
        "upper_gap": bounds.log_upper - log_det,
        "theorem_upper_minus_hadamard": bounds.log_upper - hada,
        "precision_achieved": tol,
        "det_if_representable": _representable(log_det),
    }
    print(_dump(report))
    return EXIT_OK


def _parse_n_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError as exc:
        raise UsageError(f"bad n range {text!r}; expected e.g. 2..5") from exc


def cmd_verify(args) -> int:
    n_min, n_max = _parse_n_range(args.n)
    if not 1 <= n_min <= n_max:
        raise UsageError(f"bad n range {args.n!r}")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    settings = VerifySettings(
        n_min=n_min,
        n_max=n_max,
        trials=args.trials,
        seed=args.seed,
        low=args.low,
        high=args.high,
        min_gap=args.min_gap,
        lambda_min=args.lambda_min,
        lambda_max=args.lambda_max,
        tp_max_n=args.tp_max_n,
        precision=_precision(args),
    )
    if settings.high - settings.low <= (n_max - 1) * settings.min_gap:
        raise UsageError("node range too short for the requested min gap")
    report = run_verify(settings)
    print(_dump(report))
    return EXIT_OK if report["failures"] == 0 else EXIT_CHECK


def cmd_identity(args) -> int:
    cfg = _precision(args)
    x = validate_nodes(_nodes_arg(args, "x"))
    y = _nodes_arg(args, "y", required=False)
    quad = QuadratureConfig(order=args.order, max_dims=IDENTITY_MAX_DIMS)
    checks = {}

    def add(name: str, residual: float, threshold: float) -> None:
        checks[name] = {"residual": residual, "threshold": threshold, "passed": residual <= threshold}

    add("corollary", check_corollary_identity(x, quad), COROLLARY_TOL)
    if args.u_sum is not None:
        add("theorem", check_theorem_identity(x, args.u_sum, quad, cfg), THEOREM_TOL)
    if y is not None:
        spec = ExpMatrixSpec(x, y)
        add("reduction", check_lemma1_reduction(spec, quad, cfg), REDUCTION_TOL)
    report = {
        "command": "identity",
        "input": {"x": x.tolist(), "y": y, "u_sum": args.u_sum, "order": args.order, "precision_bits": cfg.mantissa_bits},
        "checks": checks,
    }
    print(_dump(report))
    return EXIT_OK if all(c["passed"] for c in checks.values()) else EXIT_CHECK


def _lambda_arg(text: str) -> float | str:
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"--lambda must be a number or 'auto', got {text!r}") from exc


def cmd_gauss_bounds(args) -> int:
    cfg = _precision(args)
    t = sorted_nodes(_nodes_arg(args, "t"))
    model = GaussianModel(t, resolve_lambda(t, _lambda_arg(args.lam)))
    bounds = gaussian_bounds(model)
    log_det = logdet_gaussian(model, cfg).log_abs
    report = {
        "command": "gauss bounds",
        "input": {"t": t.tolist(), "lambda": model.lam, "precision_bits": cfg.mantissa_bits},
        "log_lower": bounds.log_lower,
        "log_det": log_det,
        "log_upper": bounds.log_upper,
        "det_if_representable": _representable(log_det),
    }
    print(_dump(report))
    return EXIT_OK


def cmd_gauss_select(args) -> int:
    t = sorted_nodes(_nodes_arg(args, "t"))
    lam = select_shape(t)
    _, S = centered_moments(t)
    report = {"command": "gauss select", "input": {"t": t.tolist()}, "lambda_star": lam, "N": pair_count(len(t)), "S": S}
    print(_dump(report))
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"lambda grid must be min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"cannot parse lambda grid {text!r}") from exc
    return geometric_grid(lo, hi, count)


def cmd_gauss_sweep(args) -> int:
    cfg = _precision(args)
    t_raw = _nodes_arg(args, "t")
    values = _nodes_arg(args, "values", required=False)
    if args.loocv and values is None:
        raise UsageError("--loocv needs --values")
    grid = _parse_grid(args.lam)
    rows = sweep(t_raw, grid, values if args.loocv else None, cfg)
    cols = ["lambda", "log_f", "log_lower", "log_det", "log_upper"] + (["loocv"] if args.loocv else []) + ["error"]

    def record(r) -> dict:
        rec = {"lambda": r.lam, "log_f": r.log_f, "log_lower": r.log_lower, "log_det": r.log_det, "log_upper": r.log_upper}
        if args.loocv:
            rec["loocv"] = r.loocv
        rec["error"] = r.error
        return rec

    if args.format == "json":
        t = sorted_nodes(t_raw)
        report = {
            "command": "gauss sweep",
            "input": {"t": t.tolist(), "values": values, "grid": args.lam, "precision_bits": cfg.mantissa_bits},
            "rows": [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in record(r).items()} for r in rows],
        }
        print(_dump(report))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            rec = record(r)
            writer.writerow(["" if rec[c] is None else (repr(rec[c]) if isinstance(rec[c], float) else rec[c]) for c in cols])
        sys.stdout.write(buf.getvalue())
    return EXIT_OK if all(r.ok for r in rows) else EXIT_CHECK


def cmd_gauss_interp(args) -> int:
    cfg = _precision(args)
    t_raw = _nodes_arg(args, "t")
    values = _nodes_arg(args, "values")
    fit = interpolate(t_raw, values, _lambda_arg(args.lam), cfg)
    order = sorted(range(len(t_raw)), key=lambda i: t_raw[i])
    vals = [values[i] for i in order]
    nodes = fit.t.tolist()
    report = {
        "command": "gauss interp",
        "input": {"t": nodes, "values": vals, "lambda": fit.lam, "precision_bits": cfg.mantissa_bits},
        "coefficients": fit.coefficients,
        "solve_residual": fit.residual,
        # data reproduction at the nodes with working-precision and with rounded coefficients
        "node_residual_norm": float(max(abs(a - b) for a, b in zip(fit(nodes), vals))),
        "node_residual_norm_double": float(max(abs(a - b) for a, b in zip(evaluate(nodes, fit.coefficients, fit.lam, nodes), vals))),
        "bits_used": fit.bits,
    }
    print(_dump(report))
    return EXIT_OK


def _add_nodes(p: argparse.ArgumentParser, name: str, help: str) -> None:
    p.add_argument(f"--{name}", help=f"{help}, comma separated")
    p.add_argument(f"--{name}-file", dest=f"{name}_file", help=f"file with {help}, one per line")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="oracle mantissa bits (default: $EXPDET_PREC or 256)")

    parser = _Parser(prog="expbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", parents=[common], help="bounds and oracle log-det for exp(x_i y_j)")
    _add_nodes(p, "x", "row nodes")
    _add_nodes(p, "y", "column nodes")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="randomized sandwich checks")
    p.add_argument("--n", default="2..5", help="size range, e.g. 2..5")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--low", type=float, default=-3.0)
    p.add_argument("--high", type=float, default=3.0)
    p.add_argument("--min-gap", type=float, default=1e-3)
    p.add_argument("--lambda-min", type=float, default=0.1)
    p.add_argument("--lambda-max", type=float, default=10.0)
    p.add_argument("--tp-max-n", type=int, default=5, help="largest n for the all-minors check")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("identity", parents=[common], help="quadrature checks of the integral identities")
    _add_nodes(p, "x", "nodes")
    _add_nodes(p, "y", "column nodes for the determinant reduction check")
    p.add_argument("--u-sum", type=float, default=None)
    p.add_argument("--order", type=int, default=24)
    p.set_defaults(func=cmd_identity)

    g = sub.add_parser("gauss", help="Gaussian kernel matrix tools")
    gsub = g.add_subparsers(dest="gauss_command", required=True, parser_class=_Parser)

    p = gsub.add_parser("bounds", parents=[common])
    _add_nodes(p, "t", "centers")
    p.add_argument("--lambda", dest="lam", required=True, help="shape parameter or 'auto'")
    p.set_defaults(func=cmd_gauss_bounds)

    p = gsub.add_parser("select", parents=[common])
    _add_nodes(p, "t", "centers")
    p.set_defaults(func=cmd_gauss_select)

    p = gsub.add_parser("sweep", parents=[common])
    _add_nodes(p, "t", "centers")
    _add_nodes(p, "values", "data values")
    p.add_argument("--lambda", dest="lam", required=True, help="geometric grid min:max:count")
    p.add_argument("--loocv", action="store_true", help="add the leave-one-out comparator column")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_gauss_sweep)

    p = gsub.add_parser("interp", parents=[common])
    _add_nodes(p, "t", "centers")
    _add_nodes(p, "values", "data values")
    p.add_argument("--lambda", dest="lam", default="auto", help="shape parameter or 'auto'")
    p.set_defaults(func=cmd_gauss_interp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        _emit_error(type(exc).__name__, str(exc), **exc.details())
        return EXIT_INPUT
    except PrecisionExhausted as exc:
        _emit_error("PrecisionExhausted", str(exc), bits=exc.bits)
        return EXIT_PRECISION
    except PositivityViolated as exc:
        _emit_error("PositivityViolated", str(exc))
        return EXIT_CHECK
    except OSError as exc:
        _emit_error("UsageError", str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
