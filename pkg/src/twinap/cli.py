"""Command-line front end.

    twinap tuples narrowest --k 6 --limit 20
    twinap params crucial --k 7 --l 1 --theta 1 --json
    twinap scan run --tuple 0,2 --lo 5 --hi 100 --c1 0.3 --csv --out twins.csv

Every subcommand is a thin adapter over one library call.  Output is plain
text by default, or JSON / CSV; ``--out`` writes the result to a file plus a
``<out>.manifest.json`` sidecar describing the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from . import constellation as cs
from . import greentao as gt
from . import param_planner as pp
from . import polignac as pg
from . import sieve_weights as sw
from . import tuples as tp
from .core_primes import primality_mask
from .errors import TwinAPError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3


@dataclass
class Result:
    """What a subcommand produces: a JSON document, optional CSV rows and a text rendering."""

    data: dict
    text: str
    header: list[str] | None = None
    rows: list[list[Any]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# formatting

def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return pp.format_rational(x)
    if isinstance(x, float):
        return format(x, ".12g")
    if x is None:
        return "-"
    return str(x)


def jsonable(x):
    """Floats to 12 significant digits, rationals to 'p/q', tuples to lists."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format(x, ".12g")) if math.isfinite(x) else str(x)
    if isinstance(x, Fraction):
        return pp.format_rational(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return str(x)


def render_json(res: Result) -> str:
    return json.dumps(jsonable(res.data), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_csv(res: Result) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if res.header is not None:
        w.writerow(res.header)
        w.writerows([[fmt(v) for v in row] for row in res.rows])
    else:
        w.writerow(["key", "value"])
        for k, v in jsonable(res.data).items():
            w.writerow([k, v if not isinstance(v, (list, dict)) else json.dumps(v, sort_keys=True)])
    return buf.getvalue()


def kv_text(d: dict) -> str:
    return " ".join(f"{k}={fmt(v)}" for k, v in d.items())


# ---------------------------------------------------------------------------
# handlers

def _tuple(text: str) -> tuple[int, ...]:
    return tp.parse_tuple(text)


def cmd_tuples_check(a) -> Result:
    hs = _tuple(a.tuple)
    res = tp.is_admissible(hs)
    data = {"tuple": tp.format_tuple(hs), "admissible": res.admissible,
            "omitted": res.omitted, "covering_prime": res.covering_prime}
    text = f"{tp.format_tuple(hs)} " + ("admissible" if res else f"inadmissible (covers every class mod {res.covering_prime})")
    return Result(data, text)


def cmd_tuples_narrowest(a) -> Result:
    t = tp.narrowest_tuple(a.k, a.limit)
    return Result({"k": t.k, "tuple": str(t), "diameter": t.diameter}, f"{t} diameter {t.diameter}")


def cmd_tuples_primes_above(a) -> Result:
    t = tp.primes_above_k_tuple(a.k)
    return Result({"k": t.k, "tuple": str(t), "diameter": t.diameter}, f"{t} diameter {t.diameter}")


def cmd_tuples_sseries(a) -> Result:
    v = tp.singular_series(_tuple(a.tuple), a.truncation)
    data = {"tuple": a.tuple, "value": v.value, "truncation_prime": v.truncation_prime,
            "tail_error_bound": v.tail_error_bound, "lower": v.lower, "upper": v.upper}
    return Result(data, kv_text(data))


def _weight_params(a) -> sw.WeightParams:
    R = a.R if a.R is not None else float(a.N) ** a.power
    return sw.WeightParams(_tuple(a.tuple), l=a.l, R=R, N=a.N, eta=getattr(a, "eta", 0.0) or 0.0)


def cmd_weights_s0(a) -> Result:
    r = sw.sum_S0(_weight_params(a))
    return Result(r.to_dict(), kv_text({k: v for k, v in r.to_dict().items() if k != "params"}))


def cmd_weights_s1(a) -> Result:
    r = sw.sum_S1(_weight_params(a), a.h)
    return Result(r.to_dict(), kv_text({k: v for k, v in r.to_dict().items() if k != "params"}))


def cmd_weights_restricted(a) -> Result:
    r = sw.restricted_sum_ratio(_weight_params(a), a.eta)
    d = r.to_dict()
    rows = [[q, v] for q, v in sorted(r.per_prime.items())]
    text = kv_text({k: d[k] for k in ("eta", "ratio", "restricted", "total", "driver")})
    return Result(d, text, ["q", "share"], rows)


def cmd_weights_criterion(a) -> Result:
    p = sw.WeightParams(_tuple(a.tuple), l=a.l, R=2.0, N=a.N, eta=a.eta)
    r = sw.combined_criterion_sum(p, a.theta, eps=a.eps)
    d = r.to_dict()
    return Result(d, kv_text({k: d[k] for k in ("value", "verdict", "R", "kept_n", "two_prime_n", "predicted")}))


def cmd_weights_tq1(a) -> Result:
    alpha = pp.as_rational(a.alpha)
    poly = sw.t_q1_polynomial(a.k, a.l, alpha)
    binom = sw.t_q1_binomial(a.k, a.l, alpha)
    lead, terms = sw.t_q1_terms(a.k, a.l, alpha)
    data = {"k": a.k, "l": a.l, "alpha": alpha, "value": poly, "binomial": binom,
            "agree": poly == binom == lead + sum(terms, Fraction(0)),
            "slope": sw.t_q1_slope(a.k, a.l), "value_float": float(poly)}
    return Result(data, kv_text(data))


def cmd_params_crucial(a) -> Result:
    r = pp.crucial_lhs(a.k, a.l, pp.as_rational(a.theta))
    d = r.to_dict()
    return Result(d, f"lhs={d['lhs']} {'pass' if r.passes else 'fail'}")


def cmd_params_c0(a) -> Result:
    delta = pp.as_rational(a.delta)
    c0 = pp.c0_of_theta(delta)
    return Result({"delta": delta, "c0": c0}, str(c0))


def cmd_params_minl(a) -> Result:
    l = pp.optimal_l(a.k)
    lhs = pp.lhs_value(a.k, l, 1)
    return Result({"k": a.k, "l": l, "lhs_at_theta_1": lhs}, f"l={l} lhs(theta=1)={fmt(lhs)}")


def cmd_params_mink(a) -> Result:
    theta = pp.as_rational(a.theta)
    k, l = pp.minimal_k(theta, a.l_max)
    lhs = pp.lhs_value(k, l, theta)
    c0 = pp.c0_of_theta(theta - Fraction(1, 2))
    data = {"theta": theta, "k": k, "l": l, "lhs": lhs, "c0": c0}
    return Result(data, kv_text(data))


def _records(a):
    return cs.scan(a.lo, a.hi, _tuple(a.tuple), a.c1)


def cmd_scan_run(a) -> Result:
    recs = list(_records(a))
    s = cs.summarize(recs, keep_n=False)
    data = {"tuple": a.tuple, "lo": a.lo, "hi": a.hi, "survivors": s.survivors,
            "two_prime": s.two_prime, "consecutive": s.consecutive,
            "records": [dict(zip(cs.CSV_HEADER, r.csv_row())) for r in recs]}
    text = kv_text({k: data[k] for k in ("survivors", "two_prime", "consecutive")})
    return Result(data, text, list(cs.CSV_HEADER), [r.csv_row() for r in recs])


def cmd_scan_census(a) -> Result:
    recs = _records(a)
    if a.two_prime:
        recs = (r for r in recs if r.prime_count >= 2)
    c = cs.pattern_census(recs, a.c1)
    rows = c.to_rows()
    data = {"distinct": c.distinct, "cap": c.cap, "within_cap": c.within_cap(),
            "modal": ";".join(map(str, c.modal)) if c.modal else None, "counts": dict(rows)}
    return Result(data, "\n".join(f"{b} {n}" for b, n in rows), ["b_vector", "count"], [list(r) for r in rows])


def cmd_scan_pairs(a) -> Result:
    r = cs.pattern_pair_scan(a.limit, a.predicate, max_hits=a.max_hits)
    d = r.to_dict()
    text = kv_text({k: d[k] for k in ("predicate", "count", "smallest", "reference")})
    return Result(d, text, ["n"], [[n] for n in r.hits])


def cmd_polignac_spectrum(a) -> Result:
    s = pg.gap_spectrum(a.N)
    rows = [list(r) for r in s.to_rows()]
    return Result({"N": a.N, "total": s.total, "counts": s.counts},
                  "\n".join(f"{g} {c}" for g, c in rows), ["gap", "count"], rows)


def cmd_polignac_bound(a) -> Result:
    b = pg.polignac_lower_bound(a.k)
    d = b.to_dict()
    return Result(d, kv_text({k: d[k] for k in ("bound", "comparator", "ratio")}).replace("bound=", "", 1))


def cmd_polignac_summary(a) -> Result:
    rows = [[r.gap, r.weak, r.strong] for r in pg.weak_strong_summary(a.N, a.max_gap)]
    data = {"N": a.N, "rows": [dict(zip(("gap", "weak", "strong"), r)) for r in rows]}
    return Result(data, "\n".join(" ".join(map(str, r)) for r in rows),
                  ["gap", "weak_count", "strong_count"], rows)


def _context(a) -> gt.WTrickContext:
    return gt.build_wtrick(a.w if a.w is not None else gt.default_w(), _tuple(a.tuple))


def _measure(a, ctx) -> gt.MeasureParams:
    R = a.R if a.R is not None else float(a.N) ** a.power
    window = tuple(int(x) for x in a.window.split(",")) if a.window else None
    b = a.b if a.b is not None else int(ctx.residues[0])
    return gt.MeasureParams(a.N, R, ctx, b, window)


def cmd_gt_wtrick(a) -> Result:
    ctx = _context(a)
    res = ctx.residues.tolist()
    data = {"w": ctx.w, "W": ctx.W, "tuple": str(ctx.tuple), "size": len(res),
            "expected_size": ctx.expected_size(), "residues": res if len(res) <= a.show else res[: a.show]}
    text = kv_text({k: data[k] for k in ("w", "W", "size", "expected_size")})
    return Result(data, text, ["b"], [[b] for b in res])


def cmd_gt_nu(a) -> Result:
    ctx = _context(a)
    p = _measure(a, ctx)
    v = gt.nu_measure(a.n, p)
    data = {"n": a.n, "nu": v, "W": ctx.W, "b": p.b, "R": p.R, "window": list(p.window)}
    return Result(data, fmt(v))


def cmd_gt_enu(a) -> Result:
    ctx = _context(a)
    r = gt.expectation_nu(_measure(a, ctx))
    data = {"expectation": r.expectation, "deviation": r.deviation, "window_mean": r.window_mean,
            "window_size": r.window_size, "N": r.N}
    return Result(data, kv_text(data))


def cmd_gt_delta(a) -> Result:
    hs = [int(x) for x in a.h.split(",")]
    v = gt.delta_product(hs, _tuple(a.tuple), a.W)
    return Result({"delta": v, "abs": abs(v), "sign": (v > 0) - (v < 0)}, str(v))


def cmd_gt_ap(a) -> Result:
    hs = _tuple(a.tuple)
    mask = np.ones(a.limit, dtype=bool)
    for h in hs:
        mask &= primality_mask(1 + h, a.limit + h)
    anchors = (np.flatnonzero(mask) + 1).tolist()
    aps = gt.find_aps(anchors, a.m, a.cap)
    rows = [[p.start, p.step, p.length, ";".join(map(str, p.members))] for p in aps]
    data = {"tuple": tp.format_tuple(hs), "limit": a.limit, "m": a.m, "anchors": len(anchors),
            "count": len(aps), "aps": [p.to_dict() for p in aps]}
    text = "\n".join(" ".join(map(str, p.members)) for p in aps)
    return Result(data, text, ["start", "step", "length", "members"], rows)


# ---------------------------------------------------------------------------
# parser

def _add_weight_args(p, eta: bool = False):
    p.add_argument("--tuple", default="0,2")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--N", type=int, default=10**5)
    p.add_argument("--power", type=float, default=0.2, help="R = N**power unless --R is given")
    p.add_argument("--R", type=float, default=None)
    if eta:
        p.add_argument("--eta", type=float, default=0.1)


def _add_measure_args(p):
    p.add_argument("--w", type=int, default=None, help="default: largest w with W <= 10**6")
    p.add_argument("--tuple", default="0,2")
    p.add_argument("--N", type=int, default=10**5)
    p.add_argument("--power", type=float, default=0.05)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--b", type=int, default=None, help="residue in X_W (default: smallest)")
    p.add_argument("--window", default=None, help="lo,hi (default: N/4,N/2)")


def build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON output")
    common.add_argument("--csv", action="store_true", help="CSV output")
    common.add_argument("--out", default=None, help="write to file (relative to $OUT_DIR if set)")
    common.add_argument("--config", default=None, help="key=value file; flags override it")
    common.add_argument("--threads", type=int, default=None, help="accepted; runs are sequential")

    parser = argparse.ArgumentParser(prog="twinap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)
    leaves: list[argparse.ArgumentParser] = []

    def leaf(group, name, func: Callable, help: str):
        p = group.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        leaves.append(p)
        return p

    g = groups.add_parser("tuples", help="admissible tuples").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "check", cmd_tuples_check, "admissibility test")
    p.add_argument("--tuple", required=True)
    p = leaf(g, "narrowest", cmd_tuples_narrowest, "narrowest admissible k-tuple")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--limit", type=int, default=1000)
    p = leaf(g, "primes-above", cmd_tuples_primes_above, "first k primes above k")
    p.add_argument("--k", type=int, required=True)
    p = leaf(g, "sseries", cmd_tuples_sseries, "singular series")
    p.add_argument("--tuple", required=True)
    p.add_argument("--truncation", type=int, default=10**6)

    g = groups.add_parser("weights", help="sieve weights").add_subparsers(dest="cmd", required=True)
    _add_weight_args(leaf(g, "s0", cmd_weights_s0, "sum of Lambda^2 vs main term"))
    p = leaf(g, "s1", cmd_weights_s1, "sum of theta(n+h) Lambda^2 vs main term")
    _add_weight_args(p)
    p.add_argument("--h", type=int, default=0)
    _add_weight_args(leaf(g, "restricted", cmd_weights_restricted, "small-prime restricted share"), eta=True)
    p = leaf(g, "criterion", cmd_weights_criterion, "two-primes criterion sum")
    p.add_argument("--tuple", default="0,4,6,10,12,16")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--N", type=int, default=10**5)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=sw.DEFAULT_EPS)
    p.add_argument("--eta", type=float, default=0.0)
    p = leaf(g, "tq1", cmd_weights_tq1, "exact T_{q,1}")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--alpha", default="0")

    g = groups.add_parser("params", help="parameter planner").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "crucial", cmd_params_crucial, "crucial inequality")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--theta", required=True)
    p = leaf(g, "c0", cmd_params_c0, "c0 from delta = theta - 1/2")
    p.add_argument("--delta", required=True)
    p = leaf(g, "minl", cmd_params_minl, "best l for given k")
    p.add_argument("--k", type=int, required=True)
    p = leaf(g, "mink", cmd_params_mink, "minimal k for given theta")
    p.add_argument("--theta", required=True)
    p.add_argument("--l-max", type=int, default=pp.DEFAULT_L_MAX)

    g = groups.add_parser("scan", help="constellation scanner").add_subparsers(dest="cmd", required=True)
    for name, func, hlp in (("run", cmd_scan_run, "survivor records"),
                            ("census", cmd_scan_census, "b-vector census")):
        p = leaf(g, name, func, hlp)
        p.add_argument("--tuple", required=True)
        p.add_argument("--lo", type=int, required=True)
        p.add_argument("--hi", type=int, required=True)
        p.add_argument("--c1", type=float, default=None)
        if name == "census":
            p.add_argument("--two-prime", action="store_true", help="only survivors with two primes")
    p = leaf(g, "pairs", cmd_scan_pairs, "n, n+1 pattern pairs")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--predicate", required=True, help="e.g. d, or omega=4,Omega=5,d=24")
    p.add_argument("--max-hits", type=int, default=None)

    g = groups.add_parser("polignac", help="gap statistics").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "spectrum", cmd_polignac_spectrum, "consecutive gap histogram")
    p.add_argument("--N", type=int, required=True)
    p = leaf(g, "bound", cmd_polignac_bound, "combinatorial lower bound")
    p.add_argument("--k", type=int, required=True)
    p = leaf(g, "summary", cmd_polignac_summary, "weak vs strong counts")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--max-gap", type=int, default=20)

    g = groups.add_parser("gt", help="W-trick measure and APs").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "wtrick", cmd_gt_wtrick, "residue set X_W")
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--tuple", default="0,2")
    p.add_argument("--show", type=int, default=50, help="residues listed in JSON")
    p = leaf(g, "nu", cmd_gt_nu, "nu(n)")
    _add_measure_args(p)
    p.add_argument("--n", type=int, required=True)
    _add_measure_args(leaf(g, "enu", cmd_gt_enu, "E(nu) over [1, N]"))
    p = leaf(g, "delta", cmd_gt_delta, "Delta product")
    p.add_argument("--h", required=True, help="comma-separated distinct h")
    p.add_argument("--tuple", required=True)
    p.add_argument("--W", type=int, required=True)
    p = leaf(g, "ap", cmd_gt_ap, "APs among constellation anchors")
    p.add_argument("--tuple", default="0,2")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--cap", type=int, default=None)
    return parser, leaves


def read_config(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment; keys may use - or _."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"bad config line {raw!r}")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _apply_config(leaves, config: dict[str, str]) -> None:
    for p in leaves:
        for action in p._actions:
            if action.dest in config:
                action.default = config[action.dest]
                action.required = False


def _params_of(args) -> dict:
    skip = {"func", "json", "csv", "out", "config", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, leaves = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _apply_config(leaves, read_config(known.config))
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except (OSError, ValueError) as exc:
        print(f"twinap: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json and args.csv:
        print("twinap: --json and --csv are exclusive", file=sys.stderr)
        return EXIT_USAGE

    start = time.perf_counter()
    try:
        res = args.func(args)
    except (TwinAPError, OverflowError) as exc:
        print(f"twinap: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    wall = time.perf_counter() - start

    body = render_json(res) if args.json else render_csv(res) if args.csv else res.text + "\n"
    if args.out:
        out = Path(args.out)
        if not out.is_absolute() and os.environ.get("OUT_DIR"):
            out = Path(os.environ["OUT_DIR"]) / out
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(body, encoding="utf-8")
        manifest = {"command": f"{args.group} {args.cmd}", "params": jsonable(_params_of(args)),
                    "deterministic": True, "wall_time": wall, "tool_version": __version__}
        Path(str(out) + ".manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(body)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
