"""Command-line front end: named experiments, CSV/JSON tables, plot data.

Every command is deterministic for a fixed configuration (seed included),
so identical invocations produce byte-identical output.  Tables go to
stdout by default; ``--out`` redirects them to a file and adds a metadata
sidecar recording the configuration, library version and wall time.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import sympy as sp

from . import __version__
from .exact_core import SpectralNormError, hilbert_matrix, inverse_factor_Linv
from .functions import constant, peak, polynomial
from .legendre import l2_distance, project
from .moment_ops import exact_polynomial_moments, pseudoinverse
from .range_diagnostics import hausdorff_criterion
from .stability_lab import (
    amplification_experiment,
    holder_counterexample,
    laplace_consistency,
    linv_growth_study,
    eit_forward,
    point_value_noise_study,
)

__all__ = ["main", "run", "emit_plotdata"]


def _fmt(v):
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _write_csv(records, stream):
    cols = list(records[0].keys())
    stream.write(",".join(cols) + "\n")
    for rec in records:
        stream.write(",".join(_fmt(rec[c]) for c in cols) + "\n")


def _json_safe(v):
    if isinstance(v, float) and abs(v) > 1e15:
        return _fmt(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int) and abs(v) > int(1e15):
        return str(v)
    return v


def _write_json(records, stream):
    stream.write(json.dumps([{k: _json_safe(v) for k, v in r.items()} for r in records],
                            indent=2))
    stream.write("\n")


def emit_plotdata(records, series_spec, outdir="."):
    """One two-column .dat file per (name, x_key, y_key) series."""
    if not records:
        raise ValueError("no records to plot")
    Path(outdir).mkdir(parents=True, exist_ok=True)
    paths = []
    for name, x_key, y_key in series_spec:
        path = Path(outdir) / f"{name}.dat"
        with open(path, "w") as fh:
            for rec in records:
                fh.write(f"{_fmt(rec[x_key])} {_fmt(rec[y_key])}\n")
        paths.append(path)
    return paths


def _parse_deltas(text):
    """'1e-2..1e-6' expands to the log-spaced decades between the ends."""
    if ".." in text:
        lo, hi = text.split("..")
        import math

        e1 = round(math.log10(float(lo)))
        e2 = round(math.log10(float(hi)))
        step = 1 if e2 >= e1 else -1
        return [10.0**e for e in range(e1, e2 + step, step)]
    return [float(x) for x in text.split(",")]


def _parse_poly(text):
    """Coefficients (c_0, c_1, ...) of a polynomial in t, e.g. '3t^2-1'."""
    t = sp.symbols("t")
    expr = sp.sympify(_insert_mul(text.replace("^", "**")), locals={"t": t})
    poly = sp.Poly(sp.expand(expr), t)
    coeffs = [sp.nsimplify(c) for c in poly.all_coeffs()[::-1]]
    return [Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1])) for c in coeffs]


def _insert_mul(text):
    out = []
    prev = ""
    for ch in text:
        if ch == "t" and (prev.isdigit() or prev == ")"):
            out.append("*")
        out.append(ch)
        prev = ch
    return "".join(out)


def _data_choice(name, n):
    if name == "const":
        return exact_polynomial_moments((1,), n)
    if name == "t":
        return exact_polynomial_moments((0, 1), n)
    if name == "unit":
        from .moment_ops import MomentSequence

        return MomentSequence.from_values([Fraction(1)] + [Fraction(0)] * (n - 1))
    raise ValueError(f"unknown data choice {name!r}")


def _cmd_hilbert(args):
    h = hilbert_matrix(args.n)
    return [
        {"i": i + 1, "j": j + 1, "exact": str(h[i, j]), "value": float(h[i, j])}
        for i in range(args.n)
        for j in range(args.n)
    ], None


def _cmd_linv(args):
    fac = inverse_factor_Linv(args.n)
    return [
        {
            "i": i + 1,
            "j": j + 1,
            "rational_part": str(fac.rational_part[i, j]),
            "weight": fac.diag_weights[i],
            "value": fac.entry(i + 1, j + 1),
        }
        for i in range(args.n)
        for j in range(i + 1)
    ], None


def _cmd_reconstruct(args):
    coeffs = _parse_poly(args.poly)
    if len(coeffs) > args.n:
        raise ValueError(f"degree {len(coeffs) - 1} needs n > degree, got n={args.n}")
    f = polynomial(coeffs, label=args.poly)
    y = exact_polynomial_moments(coeffs, args.n)
    rec = pseudoinverse(y)
    err = l2_distance(rec, project(f, args.n))
    return [{"poly": args.poly, "n": args.n, "l2_error": err}], None


def _cmd_hausdorff(args):
    y = _data_choice(args.data, args.n_max + 1)
    rows = []
    for N in range(1, args.n_max + 1):
        st = hausdorff_criterion(y, N)
        rows.append({
            "N": N,
            "criterion_value": float(st.criterion_value),
            "criterion_exact": str(st.criterion_value),
            "picard_partial": float(st.picard_partial),
        })
    return rows, None


def _cmd_amplification(args):
    deltas = _parse_deltas(args.deltas)
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        est = amplification_experiment(peak(), n, deltas, args.R, args.seed)
        rows.append({"n": n, "f_n": est.f_n, "ln_fn_over_n": est.rate,
                     "realizations": est.realizations})
    series = [("amplification_f_n", "n", "f_n"),
              ("amplification_rate", "n", "ln_fn_over_n")]
    return rows, series


def _cmd_growth(args):
    rows = linv_growth_study(args.n_max, precision=args.precision_bits)
    series = [("growth_bound", "i", "bound"), ("growth_norm", "i", "norm"),
              ("growth_row_max", "i", "row_max"), ("growth_diag", "i", "diag")]
    return rows, series


def _cmd_pointvalue(args):
    deltas = _parse_deltas(args.deltas)
    n = 2**args.max_level_exp
    y = [1.0 / (j + 1) for j in range(1, n + 1)]
    rows = point_value_noise_study(y, 1.0, deltas, args.max_level_exp)
    return rows, None


def _cmd_counterexample(args):
    r, m, ratio = holder_counterexample(args.mu, args.k, args.C)
    return [{"mu": args.mu, "k": args.k, "target": args.C,
             "r": r, "m": m, "ratio": ratio}], None


def _cmd_laplace(args):
    rows = laplace_consistency(peak(), list(range(1, args.j_max + 1)), tol=args.tol)
    return rows, None


def _cmd_eit(args):
    sigma = constant(1.0) if args.sigma == "const" else polynomial((0, 0, 1), label="r^2")
    modes = list(range(1, args.modes + 1))
    vals = eit_forward(sigma, modes)
    return [{"mode": n, "value": float(v)} for n, v in zip(modes, vals)], None


_COMMANDS = {
    "hilbert": _cmd_hilbert,
    "linv": _cmd_linv,
    "reconstruct": _cmd_reconstruct,
    "hausdorff": _cmd_hausdorff,
    "amplification": _cmd_amplification,
    "growth": _cmd_growth,
    "pointvalue": _cmd_pointvalue,
    "counterexample": _cmd_counterexample,
    "laplace": _cmd_laplace,
    "eit": _cmd_eit,
}


def _build_parser():
    parser = argparse.ArgumentParser(prog="hausmom",
                                     description="Hausdorff moment problem toolbox")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--precision-bits", type=int, default=256)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--config", default=None, help="key=value config file; flags win")
        p.add_argument("--plotdata", default=None, metavar="DIR",
                       help="also write two-column .dat series files into DIR")

    p = sub.add_parser("hilbert", help="entries of the Hilbert segment")
    p.add_argument("--n", type=int, default=5)
    common(p)
    p = sub.add_parser("linv", help="entries of the inverse triangular factor")
    p.add_argument("--n", type=int, default=5)
    common(p)
    p = sub.add_parser("reconstruct", help="recover a polynomial from its moments")
    p.add_argument("--poly", required=True, help="polynomial in t, e.g. '3t^2-1'")
    p.add_argument("--n", type=int, default=8)
    common(p)
    p = sub.add_parser("hausdorff", help="range criterion levels")
    p.add_argument("--n-max", type=int, default=15)
    p.add_argument("--data", choices=("const", "t", "unit"), default="const")
    common(p)
    p = sub.add_parser("amplification", help="noise-amplification regression")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--deltas", default="1e-2..1e-7")
    p.add_argument("--R", type=int, default=20)
    common(p)
    p = sub.add_parser("growth", help="inverse-factor growth study")
    p.add_argument("--n-max", type=int, default=20)
    common(p)
    p = sub.add_parser("pointvalue", help="point-value recovery at t=1")
    p.add_argument("--deltas", default="1e-2..1e-6")
    p.add_argument("--max-level-exp", type=int, default=17)
    common(p)
    p = sub.add_parser("counterexample", help="Hoelder-rate counterexample witness")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--C", type=float, default=100.0)
    common(p)
    p = sub.add_parser("laplace", help="moment vs Laplace-sample agreement")
    p.add_argument("--j-max", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)
    p = sub.add_parser("eit", help="linearized layered-disc forward map")
    p.add_argument("--sigma", choices=("const", "r2"), default="r2")
    p.add_argument("--modes", type=int, default=8)
    common(p)
    return parser


def _apply_config(parser, argv, args):
    """Config file keys fill in options the command line left at default."""
    if not args.config:
        return args
    overrides = {}
    for line in Path(args.config).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {line!r}")
        key, _, val = line.partition("=")
        overrides[key.strip().replace("-", "_")] = val.strip()
    explicit = {a.lstrip("-").replace("-", "_").split("=")[0] for a in argv if a.startswith("--")}
    for key, val in overrides.items():
        if key in explicit:
            continue
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        cur = getattr(args, key)
        cast = type(cur) if cur is not None and not isinstance(cur, bool) else str
        setattr(args, key, cast(val))
    return args


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(parser, argv, args)
        start = time.monotonic()
        records, series = _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SpectralNormError, RuntimeError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    elapsed = time.monotonic() - start
    writer = _write_csv if args.format == "csv" else _write_json
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer(records, fh)
        meta = {
            "command": args.command,
            "config": {k: v for k, v in vars(args).items() if k != "command"},
            "version": __version__,
            "wall_time_s": elapsed,
        }
        Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    else:
        writer(records, sys.stdout)
    if args.plotdata and series:
        emit_plotdata(records, series, args.plotdata)
    return 0


def main():
    sys.exit(run())
