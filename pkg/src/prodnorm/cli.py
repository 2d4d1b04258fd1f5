"""Batch command-line front end.

Subcommands evaluate the library and emit CSV or JSON table data (no plot
rendering).  All outputs are deterministic given the seed, use 17
significant digits, and are written atomically (temp file + rename).
JSON outputs follow the envelope schema shipped at
``prodnorm/data/cli_output.schema.json``.

Exit codes: 0 success, 1 runtime failure (machine-readable JSON error on
stderr), 2 argument/config parse failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import chaos, dist, sampling, stein
from ._config import audit_grid
from .errors import ProdnormError
from .moments import moments_recursive
from .params import DistParams


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return v


def format_sigfigs(v, sig=3):
    """Fixed-point string with the given significant figures (keeps
    trailing zeros, unlike %g)."""
    if v == 0:
        return "0." + "0" * (sig - 1)
    exp10 = math.floor(math.log10(abs(v)))
    decimals = max(0, sig - 1 - exp10)
    return f"{v:.{decimals}f}"


def _atomic_write(path, text, binary=False):
    if path in (None, "-"):
        if binary:
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".prodnorm-tmp-")
    try:
        with os.fdopen(fd, "wb" if binary else "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, command, params, columns, rows):
    if args.format == "json":
        payload = {"command": command, "params": params,
                   "columns": list(columns),
                   "rows": [list(row) for row in rows]}
        text = json.dumps(payload, sort_keys=True, indent=2)
        _atomic_write(args.out, text + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        _atomic_write(args.out, buf.getvalue())


def _params(args):
    return DistParams(args.n, args.rho, args.sigma_x, args.sigma_y)


def _grid_values(spec):
    lo, hi, count = spec.split(":")
    return np.linspace(float(lo), float(hi), int(count))


def _cmd_pdf(args):
    p = _params(args)
    xs = _grid_values(args.grid) if args.grid else [args.x]
    rows = [[float(x), dist.pdf(p, float(x))] for x in xs]
    _emit(args, "pdf", _pdict(p), ["x", "pdf"], rows)


def _cmd_cdf(args):
    p = _params(args)
    xs = _grid_values(args.grid) if args.grid else [args.x]
    rows = [[float(x), dist.cdf(p, float(x))] for x in xs]
    _emit(args, "cdf", _pdict(p), ["x", "cdf"], rows)


def _cmd_quantile(args):
    p = _params(args)
    rows = [[q, dist.quantile(p, q)] for q in args.q]
    _emit(args, "quantile", _pdict(p), ["q", "x"], rows)


def _cmd_moments(args):
    p = _params(args)
    ms = moments_recursive(p, args.k)
    rows = [[k + 1, ms.raw[k], ms.central[k], ms.cumulants[k]]
            for k in range(args.k)]
    _emit(args, "moments", _pdict(p), ["k", "raw", "central", "cumulant"],
          rows)


def _cmd_mode(args):
    p = _params(args)
    m = dist.mode(p)
    lo = hi = refined = None
    if p.n >= 3 and p.rho != 0.0:
        lo, hi, refined = dist.mode_brackets(p)
    _emit(args, "mode", _pdict(p),
          ["mode", "bracket_lo", "bracket_hi", "bracket_refined"],
          [[m, lo, hi, refined]])


def _cmd_median(args):
    p = _params(args)
    _emit(args, "median", _pdict(p), ["median"], [[dist.median(p)]])


def _cmd_sample(args):
    p = _params(args)
    batch = sampling.sample(p, args.rep, args.seed, args.count)
    if args.format == "bin":
        buf = io.BytesIO()
        import struct
        buf.write(struct.pack("<Q", len(batch.values)))
        buf.write(np.ascontiguousarray(batch.values, dtype="<f8").tobytes())
        _atomic_write(args.out, buf.getvalue(), binary=True)
        return
    if args.format == "csv":
        text = "".join(f"{v:.17g}\n" for v in batch.values)
        _atomic_write(args.out, text)
        return
    _emit(args, "sample",
          {**_pdict(p), "rep": args.rep, "seed": args.seed,
           "count": args.count},
          ["value"], [[float(v)] for v in batch.values])


def _cmd_stein(args):
    p = _params(args)
    rows = []
    for gfun in stein.default_suite():
        rep = stein.stein_residual(p, gfun, method=args.method,
                                   seed=args.seed, count=args.count)
        err = rep.quad_err if rep.quad_err is not None else rep.stderr
        rows.append([rep.test_function, rep.residual, err, rep.method])
    _emit(args, "stein", _pdict(p),
          ["test_function", "residual", "err", "method"], rows)


def _cmd_table1(args):
    grid = audit_grid()["median_grid"]
    columns = ["n"] + [f"rho={r:g}" for r in grid["rho"]]
    rows = []
    for n in grid["n"]:
        row = [n]
        for r in grid["rho"]:
            row.append(format_sigfigs(
                dist.median(DistParams(n, r, args.sigma_x, args.sigma_y)), 3))
        rows.append(row)
    _emit(args, "table1",
          {"sigma_x": args.sigma_x, "sigma_y": args.sigma_y}, columns, rows)


def _cmd_audit(args):
    cfg = audit_grid()
    rows = []
    medg = cfg["median_grid"]
    for n in medg["n"]:
        for r in medg["rho"]:
            a = dist.median_conjecture_audit(
                DistParams(n, r, args.sigma_x, args.sigma_y))
            ok = (a.lower_ok and a.upper_exp_ok and a.upper_chain_ok
                  and (a.upper_n2_ok is not False) and a.ordering_ok)
            rows.append(["median_conjecture", n, r, a.median, a.mean, ok])
    modg = cfg["mode_grid"]
    for n in modg["n"]:
        for r in modg["rho"]:
            p = DistParams(n, r, args.sigma_x, args.sigma_y)
            m = dist.mode(p)
            lo, hi, refined = dist.mode_brackets(p)
            ok = lo < m < hi and (refined is None or m >= refined - 1e-12)
            rows.append(["mode_brackets", n, r, m, hi, ok])
    sbg = cfg["survival_bound_grid"]
    for r in sbg["rho"]:
        for x in sbg["x"]:
            p = DistParams(1, r, args.sigma_x, args.sigma_y)
            sv = dist.survival(p, x * p.s)
            bound = dist.survival_upper_bound(p, x * p.s)
            rows.append(["survival_bound", 1, r, sv, bound, sv < bound])
    _emit(args, "audit", {"config_version": cfg["version"]},
          ["check", "n", "rho", "value", "reference", "ok"], rows)


def _cmd_chaos_sweep(args):
    rows = chaos.sweep(args.phi, args.gamma1, grid_m=args.grid_m,
                       domain_cut=args.domain_cut, seed=args.seed,
                       w1_count=args.w1_count)
    columns = chaos._SWEEP_COLUMNS
    _emit(args, "chaos-sweep",
          {"phi": args.phi, "grid_m": args.grid_m,
           "domain_cut": args.domain_cut, "seed": args.seed},
          columns, [[row[c] for c in columns] for row in rows])


def _pdict(p):
    return {"n": p.n, "rho": p.rho, "sigma_x": p.sigma_x,
            "sigma_y": p.sigma_y}


def _add_dist_args(sub):
    sub.add_argument("--n", type=int, default=1)
    sub.add_argument("--rho", type=float, default=0.0)
    sub.add_argument("--sigma-x", type=float, default=1.0)
    sub.add_argument("--sigma-y", type=float, default=1.0)


def _add_io_args(sub, formats=("csv", "json")):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default="-")
    sub.add_argument("--format", choices=formats, default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="prodnorm",
        description="Distribution of products of zero-mean correlated "
                    "normals and their means: evaluate, tabulate, sample, "
                    "audit.")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("pdf", help="density values at a point or grid")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--grid", help="MIN:MAX:COUNT")
    sp.set_defaults(func=_cmd_pdf)

    sp = subs.add_parser("cdf", help="distribution function values")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.add_argument("--x", type=float, default=0.0)
    sp.add_argument("--grid", help="MIN:MAX:COUNT")
    sp.set_defaults(func=_cmd_cdf)

    sp = subs.add_parser("quantile", help="invert the CDF")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.add_argument("--q", type=float, nargs="+", default=[0.5])
    sp.set_defaults(func=_cmd_quantile)

    sp = subs.add_parser("moments", help="raw/central moments and cumulants")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.add_argument("--k", type=int, default=4)
    sp.set_defaults(func=_cmd_moments)

    sp = subs.add_parser("mode", help="mode and its brackets")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.set_defaults(func=_cmd_mode)

    sp = subs.add_parser("median", help="median")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.set_defaults(func=_cmd_median)

    sp = subs.add_parser("sample", help="seeded batches via a representation")
    _add_dist_args(sp)
    _add_io_args(sp, formats=("csv", "json", "bin"))
    sp.add_argument("--rep", choices=["R1", "R2", "R4", "R5"], default="R4")
    sp.add_argument("--count", type=int, default=1000)
    sp.set_defaults(func=_cmd_sample)

    sp = subs.add_parser("stein", help="Stein-identity residuals for the "
                                       "shipped test-function suite")
    _add_dist_args(sp)
    _add_io_args(sp)
    sp.add_argument("--method", choices=["quadrature", "monte_carlo"],
                    default="quadrature")
    sp.add_argument("--count", type=int, default=10 ** 5)
    sp.set_defaults(func=_cmd_stein)

    sp = subs.add_parser("audit", help="median-conjecture, mode-bracket and "
                                       "survival-bound audits on the frozen "
                                       "grids")
    sp.add_argument("--sigma-x", type=float, default=1.0)
    sp.add_argument("--sigma-y", type=float, default=1.0)
    _add_io_args(sp)
    sp.set_defaults(func=_cmd_audit)

    sp = subs.add_parser("chaos-sweep", help="six-moment gap along a "
                                             "gamma1 path")
    _add_io_args(sp)
    sp.add_argument("--phi", type=float, default=0.5)
    sp.add_argument("--gamma1", type=float, nargs="+",
                    default=[-0.60, -0.55, -0.52, -0.51])
    sp.add_argument("--grid-m", type=int, default=256)
    sp.add_argument("--domain-cut", type=float, default=None)
    sp.add_argument("--w1-count", type=int, default=0)
    sp.set_defaults(func=_cmd_chaos_sweep)

    sp = subs.add_parser("table1", help="median grid at unit scale, 3 "
                                        "significant figures")
    sp.add_argument("--sigma-x", type=float, default=1.0)
    sp.add_argument("--sigma-y", type=float, default=1.0)
    _add_io_args(sp)
    sp.set_defaults(func=_cmd_table1)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ProdnormError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
