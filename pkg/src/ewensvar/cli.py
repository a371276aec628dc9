"""Command-line interface: ``ewensvar <subcommand> --n N --theta T [...]``.

Exit status is 0 when every executed check passes, 1 when a check fails and
2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from itertools import product

import numpy as np

from . import esf, hahn, oracle, report, spectral, suites
from .scalar import EXACT, FLOAT, MODES, DegenerateSizeError, ModeError, parse_scalar, parse_theta

WEIGHT_PRESETS = ("log", "frac", "extremal", "ones")


class UsageError(Exception):
    pass


# -- argument parsing ---------------------------------------------------------


def parse_n_list(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_theta_list(text: str, mode: str) -> list:
    return [parse_theta(t, mode) for t in text.split(",")]


def cells(args, min_n: int = 2) -> list:
    try:
        ns = parse_n_list(args.n)
        thetas = parse_theta_list(args.theta, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not args.grid and (len(ns) > 1 or len(thetas) > 1):
        raise UsageError("several n or theta values need --grid")
    for n in ns:
        if n < min_n:
            raise UsageError(f"n must be at least {min_n}, got {n}")
    return list(product(ns, thetas))


def _frac_weight(x: float, j: int) -> float:
    return x * j - math.floor(x * j)


def load_weights(source: str, n: int, theta, mode: str) -> list:
    """Weight vector from a preset name, an inline comma list, or a file with one value per line.

    Presets: ``log`` (a_j = log j), ``frac[:x]`` (a_j = {x j}, default x = sqrt 2),
    ``extremal`` and ``ones``.  ``log`` and ``frac`` are irrational and always float.
    """
    name, _, arg = source.partition(":")
    if name == "log":
        return [math.log(j) for j in range(1, n + 1)]
    if name == "frac":
        x = math.sqrt(2) if not arg else float(parse_scalar(arg, FLOAT))
        return [_frac_weight(x, j) for j in range(1, n + 1)]
    if name == "extremal":
        return spectral.extremal_a(n, theta)
    if name == "ones":
        return [parse_scalar("1", mode)] * n
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            values = [line.strip() for line in fh if line.strip() and not line.lstrip().startswith("#")]
    elif "," in source or _looks_numeric(source):
        values = [v for v in source.split(",") if v.strip()]
    else:
        raise UsageError(f"cannot read weights from {source!r}")
    try:
        a = [parse_scalar(v, mode) for v in values]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if len(a) != n:
        raise UsageError(f"weight vector has {len(a)} entries, expected n={n}")
    return a


def _looks_numeric(text: str) -> bool:
    try:
        parse_scalar(text, EXACT)
        return True
    except ValueError:
        return False


def _float_theta(theta, a):
    # irrational weights force float arithmetic for the closed forms
    if any(isinstance(x, float) for x in a) and not isinstance(theta, float):
        return float(theta)
    return theta


# -- subcommands ----------------------------------------------------------------


def _tau_cell(cell):
    n, theta = cell
    return spectral.tau_report(n, theta)


def cmd_tau(args) -> tuple:
    recs = _map(args, _tau_cell, cells(args))
    return recs, all(r["pass"] for r in recs)


def _spectrum_cell(cell, mode):
    n, theta = cell
    if mode == EXACT:
        R = spectral.triangularize(n, theta)
        lower = spectral.strictly_lower_zero(R)
        return [{"n": n, "theta": theta, "r": r, "mu_closed": spectral.mu_closed(r, theta),
                 "diag": R[r - 1][r - 1],
                 "pass": lower and R[r - 1][r - 1] == spectral.mu_closed(r, theta)}
                for r in range(1, n + 1)]
    return [{"n": n, "theta": theta, "r": r, "mu_closed": mu, "mu_numeric": num, "abs_err": err,
             "pass": err < suites.EIG_TOL}
            for r, mu, num, err in spectral.match_spectrum(n, theta)]


def cmd_spectrum(args) -> tuple:
    groups = _map(args, partial(_spectrum_cell, mode=args.mode), cells(args))
    recs = [r for g in groups for r in g]
    return recs, all(r["pass"] for r in recs)


def cmd_matrix(args) -> tuple:
    (n, theta), = cells(args)
    which = args.which
    if which in ("C", "U", "R") or (which == "M" and args.mode == EXACT):
        if which == "M":
            raise UsageError("M carries square roots; use --mode float or --which C")
        if which == "C":
            rows = spectral.build_kernel(n, theta).C
        elif which == "U":
            rows = spectral.exp_L_gauge(n, theta)
        else:
            rows = spectral.triangularize(n, theta)
    elif which == "M":
        rows = spectral.build_M_float(n, theta).tolist()
    elif which == "L":
        rows = spectral.build_L(n, theta)[0].tolist()
    elif which == "V":
        U = spectral.exp_L_gauge(n, theta)
        rows = spectral.gauge_to_float(U, spectral.gauge_dsq(n, theta)).tolist()
    else:
        raise UsageError(f"unknown matrix {which!r}")
    rows = [list(r) for r in rows]
    if args.format == "csv":
        return report.matrix_csv(rows), True
    return [{"n": n, "theta": theta, "matrix": which, "rows": rows}], True


def cmd_hahn(args) -> tuple:
    (n, theta), = cells(args)
    b = hahn.hahn_basis(n, theta)
    if args.format == "csv":
        header = ["j"] + [f"q{r}" for r in range(n)]
        body = [[j] + [b.values[r][j - 1] for r in range(n)] for j in range(1, n + 1)]
        return ",".join(header) + "\n" + report.matrix_csv(body) + \
            report.matrix_csv([["pi_sq"] + list(b.pi_sq)]), True
    recs = [{"n": n, "theta": theta, "r": r, "pi_sq": b.pi_sq[r], "values": list(b.values[r])}
            for r in range(n)]
    return recs, all(p > 0 for p in b.pi_sq)


def _suite_cell(cell, names, seed, count):
    n, theta = cell
    out = []
    for name in names:
        out.extend(suites.run_suite(name, n, theta, seed, count))
    return out


def _exact_cells(args, min_n=2):
    if args.mode != EXACT:
        raise UsageError("verification suites run in exact mode")
    return cells(args, min_n)


def cmd_identities(args) -> tuple:
    groups = _map(args, partial(_suite_cell, names=("identities",), seed=args.seed, count=args.count),
                  _exact_cells(args))
    recs = [r for g in groups for r in g]
    return recs, not suites.failures(recs)


def cmd_oracle(args) -> tuple:
    cs = cells(args, 1)
    if args.weights:
        recs = []
        for n, theta in cs:
            a = load_weights(args.weights, n, theta, args.mode)
            recs.append(oracle.oracle_mean_var(n, _float_theta(theta, a), a).as_dict())
        return recs, all(r["agree"] for r in recs)
    groups = _map(args, partial(_suite_cell, names=("oracle",), seed=args.seed, count=args.count),
                  _exact_cells(args, 1))
    recs = [r for g in groups for r in g]
    return recs, not suites.failures(recs)


def cmd_sample(args) -> tuple:
    if args.count < 2:
        raise UsageError("--count must be at least 2")
    if not args.weights:
        raise UsageError("sample needs --weights")
    recs = []
    for n, theta in cells(args):
        a = load_weights(args.weights, n, theta, args.mode)
        th = _float_theta(theta, a)
        batch = oracle.sample_batch(n, theta, args.count, args.seed, args.streams, args.jobs)
        h = batch.draws @ np.array([float(x) for x in a])
        var, var_se = oracle.variance_with_se(h)
        mean, mean_se = float(h.mean()), float(h.std(ddof=1) / math.sqrt(h.size))
        var_f = esf.variance_D(n, th, a)
        bform = esf.b_form(n, th, a)
        ratio = var / float(th * bform) if bform else math.nan
        var_z = (var - float(var_f)) / var_se if var_se > 0 else 0.0
        recs.append({
            "n": n, "theta": theta, "count": args.count, "seed": args.seed, "streams": args.streams,
            "mean_mc": mean, "mean_se": mean_se, "mean_formula": esf.mean_A(n, th, a),
            "var_mc": var, "var_se": var_se, "var_formula": var_f, "var_z": var_z,
            "ratio_mc": ratio, "ratio_se": var_se / float(th * bform) if bform else math.nan,
            "tau": spectral.tau_closed(theta),
            "pass": abs(var_z) <= 4.0,
        })
    return recs, all(r["pass"] for r in recs)


def cmd_verify(args) -> tuple:
    names = [s.strip() for s in (args.suites or "").split(",") if s.strip()]
    if not names:
        raise UsageError("--suites needs at least one of " + ",".join(suites.SUITES))
    bad = [s for s in names if s not in suites.SUITES]
    if bad:
        raise UsageError(f"unknown suites: {','.join(bad)}")
    min_n = 1 if names == ["oracle"] else 2
    groups = _map(args, partial(_suite_cell, names=tuple(names), seed=args.seed, count=args.count),
                  _exact_cells(args, min_n))
    recs = [r for g in groups for r in g]
    fails = suites.failures(recs)
    if args.format == "plain":
        lines = [f"{len(recs)} checks, {len(fails)} failed"]
        lines += [f"FAIL {r['suite']}:{r['check']} {report.jsonable(r['params'])}" for r in fails]
        return "\n".join(lines) + "\n", not fails
    return recs, not fails


def _map(args, fn, items):
    jobs = getattr(args, "jobs", None)
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


COMMANDS = {
    "tau": cmd_tau,
    "spectrum": cmd_spectrum,
    "matrix": cmd_matrix,
    "hahn": cmd_hahn,
    "identities": cmd_identities,
    "oracle": cmd_oracle,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ewensvar", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", required=True, help="size n, a range 2..12, or a comma list")
    common.add_argument("--theta", required=True, help="theta as p/q or decimal; comma list with --grid")
    common.add_argument("--mode", choices=MODES, default=EXACT)
    common.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--grid", action="store_true", help="sweep every (n, theta) combination")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None, help="worker processes/threads")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("tau", parents=[common], help="sharp constant three ways")
    sub.add_parser("spectrum", parents=[common], help="closed-form spectrum against the matrix")
    p = sub.add_parser("matrix", parents=[common], help="emit C, M, U, R, L or V")
    p.add_argument("--which", default="C", choices=("C", "M", "U", "R", "L", "V"))
    sub.add_parser("hahn", parents=[common], help="Hahn polynomial table and norms")
    sub.add_parser("identities", parents=[common], help="exact identity suite")
    p = sub.add_parser("oracle", parents=[common], help="exhaustive enumeration against the formulas")
    p.add_argument("--weights")
    p = sub.add_parser("sample", parents=[common], help="Monte Carlo moments of an additive statistic")
    p.add_argument("--weights", help="preset (log, frac[:x], extremal, ones), inline list, or file")
    p.add_argument("--streams", type=int, default=1)
    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suites", help="comma list from: " + ",".join(suites.SUITES))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.count is None:
        args.count = 100_000 if args.command == "sample" else 200
    try:
        result, ok = COMMANDS[args.command](args)
    except (UsageError, DegenerateSizeError, ModeError) as exc:
        parser.error(str(exc))
    except ValueError as exc:
        parser.error(str(exc))
    text = result if isinstance(result, str) else report.render_records(result, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
