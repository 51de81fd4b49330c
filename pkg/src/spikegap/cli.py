"""Command-line front end: parameter sweeps with CSV/JSON output.

Output is deterministic for a fixed configuration: rows follow the
lexicographic sweep order, floats are printed with repr precision, and no
timestamps enter the data.  CSV files start with a stable header line;
JSON documents carry a schema_version field.

Range syntax: ``start:stop:step`` (arithmetic, inclusive of stop when it
lands on the grid) or ``start:stop:geometric:count``; a bare number is a
one-element range.  n grids are forced to multiples of 4.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import crossings as crossings_mod
from . import instanton as instanton_mod
from . import scaling as scaling_mod
from . import variational as variational_mod
from . import wkb as wkb_mod
from .errors import SpikegapError
from .model import SpikeCost, SpikeParams, critical_point
from .spectrum import gap, min_gap_scan

SCHEMA_VERSION = 1
CSV_COLUMNS = ["n", "alpha", "beta", "s", "method", "value", "log_value",
               "precision_bits", "flags"]

EXIT_OK = 0
EXIT_ALL_FAILED = 3


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def parse_range(spec, integer=False, multiple_of=None):
    """Parse start:stop:step | start:stop:geometric:count | single value."""
    parts = str(spec).split(":")
    if len(parts) == 1:
        vals = [float(parts[0])]
    elif len(parts) == 3:
        start, stop, step = map(float, parts)
        if step <= 0:
            raise ValueError(f"step must be positive in range {spec!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + i * step for i in range(max(count, 1))]
    elif len(parts) == 4 and parts[2] == "geometric":
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[3])
        if integer:
            return list(scaling_mod.geometric_grid(start, stop, count,
                                                   multiple_of=multiple_of or 1))
        vals = list(np.exp(np.linspace(math.log(start), math.log(stop), count)))
    else:
        raise ValueError(f"unrecognized range syntax: {spec!r}")
    if integer:
        ivals = [int(round(v)) for v in vals]
        if multiple_of:
            bad = [v for v in ivals if v % multiple_of != 0]
            if bad:
                raise ValueError(
                    f"n values must be multiples of {multiple_of}, got {bad[:5]}"
                )
        return ivals
    return vals


def _beta_arg(args):
    if getattr(args, "width_one", False):
        return None
    if getattr(args, "beta", None) is None:
        raise ValueError("provide --beta or --width-one")
    return args.beta


def _beta_repr(beta):
    return "width-one" if beta is None else beta


def _jobs(args):
    if args.jobs is not None:
        return max(1, args.jobs)
    return max(1, int(os.environ.get("SPIKEGAP_JOBS", "1")))


def _gap_cell(task):
    n, alpha, beta, s, precision_bits, physical = task
    est = gap(SpikeCost(SpikeParams(n, alpha, beta)), s,
              precision_bits=precision_bits, physical=physical)
    return est.value, est.log_value, est.precision_bits, ",".join(sorted(est.flags))


def _run_cells(tasks, jobs):
    if jobs <= 1:
        return [_gap_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_gap_cell, tasks, chunksize=8))


def cmd_gap_curve(args):
    beta = _beta_arg(args)
    s_values = parse_range(args.s)
    ns = parse_range(args.n, integer=True, multiple_of=4)
    tasks = [(n, args.alpha, beta, s, args.precision_bits, args.physical)
             for n in ns for s in s_values]
    rows = []
    failures = 0
    for (n, alpha, b, s, _, _), (value, logv, pb, flags) in zip(
            tasks, _run_cells(tasks, _jobs(args))):
        if value is None:
            failures += 1
        rows.append([n, alpha, _beta_repr(b), s, "exact", value, logv, pb, flags])
    return ("csv", CSV_COLUMNS, rows,
            EXIT_ALL_FAILED if failures == len(rows) else EXIT_OK)


def cmd_min_gap(args):
    beta = _beta_arg(args)
    grid = tuple(parse_range(args.s_grid)) if args.s_grid else (0.02, 0.98, 97)
    if args.s_grid:
        grid = np.asarray(grid)
    n = parse_range(args.n, integer=True, multiple_of=4)[0]
    s_min, est = min_gap_scan(SpikeCost(SpikeParams(n, args.alpha, beta)),
                              s_grid=grid, refine_tol=args.refine_tol,
                              precision_bits=args.precision_bits)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "min-gap",
        "n": n, "alpha": args.alpha, "beta": _beta_repr(beta),
        "s_min": s_min, "gap": est.value, "log_gap": est.log_value,
        "precision_bits": est.precision_bits, "flags": sorted(est.flags),
    }
    return ("json", doc, None, EXIT_OK if est.value is not None else EXIT_ALL_FAILED)


def cmd_slope_vs_alpha(args):
    alphas = parse_range(args.alpha)
    ns = parse_range(args.n, integer=True, multiple_of=4)
    points = scaling_mod.slope_vs_alpha(alphas, n_values=ns,
                                        precision_bits=args.precision_bits)
    rows = [["", p.alpha, "width-one", "", "slope_fit", p.slope, "",
             args.precision_bits, f"omitted={p.n_omitted}" if p.n_omitted else ""]
            for p in points]
    return ("csv", CSV_COLUMNS, rows, EXIT_OK)


def cmd_bounds(args):
    n = parse_range(args.n, integer=True, multiple_of=4)[0]
    pair = variational_mod.bound_pair(n, args.alpha)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "bounds",
        "n": n, "alpha": args.alpha, "beta": "width-one", "s": critical_point(),
        "lower": pair.lower,
        "upper": None if math.isinf(pair.upper) else pair.upper,
        "x_lower": pair.x_lower,
        "x_upper": None if math.isnan(pair.x_upper) else pair.x_upper,
        "flags": sorted(pair.flags),
    }
    return ("json", doc, None, EXIT_OK)


def cmd_instanton(args):
    ns = parse_range(args.n, integer=True, multiple_of=4)
    rows = []
    failures = 0
    if args.cubic_q is not None:
        from .model import CubicCost

        hint = args.s_hint if args.s_hint is not None else 0.5
        for n in ns:
            cm = CubicCost(n, args.cubic_q)
            try:
                s_deg, t1, t2 = instanton_mod.find_degenerate_minima(cm, hint)
                res = instanton_mod.action(cm, s_deg, t1, t2)
                value, flags = res.S_I, res.applicability
                hint = s_deg
            except SpikegapError as exc:
                value, flags, s_deg = None, type(exc).__name__, ""
            if value is None:
                failures += 1
            rows.append([n, "", f"cubic(q={args.cubic_q})", s_deg,
                         "instanton_exponent", value,
                         math.log(value) if value else "", 53, flags])
    else:
        beta = _beta_arg(args)
        hint = args.s_hint if args.s_hint is not None else critical_point()
        halfwidth = 0.35
        for n in ns:
            cm = SpikeCost(SpikeParams(n, args.alpha, beta))
            try:
                s_deg, t1, t2 = instanton_mod.find_degenerate_minima(
                    cm, hint, search_halfwidth=halfwidth)
                res = instanton_mod.action(cm, s_deg, t1, t2)
                value, flags = res.S_I, res.applicability
                hint, halfwidth = s_deg, 0.08
            except SpikegapError as exc:
                value, flags, s_deg = None, type(exc).__name__, ""
            if value is None:
                failures += 1
            rows.append([n, args.alpha, _beta_repr(beta), s_deg,
                         "instanton_exponent", value,
                         math.log(value) if value else "", 53, flags])
    return ("csv", CSV_COLUMNS, rows,
            EXIT_ALL_FAILED if failures == len(rows) else EXIT_OK)


def cmd_wkb(args):
    n = parse_range(args.n, integer=True, multiple_of=4)[0]
    est = wkb_mod.wkb_gap(n, args.alpha, args.beta)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "wkb",
        "n": n, "alpha": args.alpha, "beta": args.beta,
        "d": est.d, "d_leading": est.d_leading,
        "j1": est.j1, "j2": est.j2,
        "tunneling_integral": est.tunneling_integral,
        "log_gap_estimate": est.log_gap_estimate,
        "classification": "superpolynomial" if est.superpolynomial else "polynomial",
    }
    return ("json", doc, None, EXIT_OK)


def cmd_crossings(args):
    n = parse_range(args.n, integer=True, multiple_of=4)[0]
    rows = []
    for t in range(1, args.t_max + 1):
        for i in range(1, t + 1) if args.all_nodes else [1]:
            pred = crossings_mod.predict_crossing(n, t, i)
            if args.verify:
                pred = crossings_mod.verify_crossing(n, args.alpha, pred)
            flags = ",".join(sorted(pred.flags)) if pred.flags else ""
            extra = f"t={t},i={i}"
            if pred.off_dip_gap is not None:
                extra += f",off_dip={pred.off_dip_gap!r}"
            rows.append([n, args.alpha, "width-one", pred.s_t_i, "exact",
                         pred.verified_gap, "", 53,
                         ";".join(x for x in (extra, flags) if x)])
    return ("csv", CSV_COLUMNS, rows, EXIT_OK)


def cmd_classify(args):
    ns = parse_range(args.n, integer=True, multiple_of=4)
    s_star = critical_point()
    tasks = [(n, args.alpha, args.beta, s_star, args.precision_bits, False)
             for n in ns]
    cells = _run_cells(tasks, _jobs(args))
    pts = [(n, v[0]) for n, v in zip(ns, cells) if v[0] is not None and v[0] > 0]
    omitted = [n for n, v in zip(ns, cells) if v[0] is None or v[0] <= 0]
    f = scaling_mod.fit(pts)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "alpha": args.alpha, "beta": args.beta, "s": s_star,
        "n_grid": list(map(int, ns)), "n_omitted": omitted,
        "slope": f.slope, "intercept": f.intercept,
        "concavity_score": f.concavity_score,
        "verdict": f.verdict.value,
        "gaps": {str(n): v[0] for n, v in zip(ns, cells)},
    }
    return ("json", doc, None, EXIT_OK)


def _write_output(kind, payload, rows, path):
    if kind == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(payload)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(sub, n_help="n value or range"):
    sub.add_argument("--n", required=True, help=n_help)
    sub.add_argument("--precision-bits", type=int, default=53)
    sub.add_argument("--output", default=None, help="output file (default stdout)")
    sub.add_argument("--jobs", type=int, default=None,
                     help="parallel workers (default $SPIKEGAP_JOBS or 1)")


def _add_spike_params(sub, need_beta=True):
    sub.add_argument("--alpha", type=float, required=True)
    if need_beta:
        group = sub.add_mutually_exclusive_group(required=True)
        group.add_argument("--beta", type=float, default=None)
        group.add_argument("--width-one", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spikegap",
        description="Spectral-gap estimates for spike annealing Hamiltonians.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gap-curve", help="exact gap over an s grid")
    _add_common(p)
    _add_spike_params(p)
    p.add_argument("--s", required=True, help="s range, e.g. 0.30:0.45:0.001")
    p.add_argument("--physical", action="store_true",
                   help="rescale to the unnormalized interpolation")
    p.set_defaults(func=cmd_gap_curve)

    p = subs.add_parser("min-gap", help="locate the minimum of the gap curve")
    _add_common(p)
    _add_spike_params(p)
    p.add_argument("--s-grid", default=None, help="start:stop:count coarse grid")
    p.add_argument("--refine-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_min_gap)

    p = subs.add_parser("slope-vs-alpha", help="fitted gap exponent vs alpha")
    _add_common(p, n_help="n range for each fit, e.g. 500:860:4")
    p.add_argument("--alpha", required=True, help="alpha range, e.g. 0.1:1.5:0.05")
    p.set_defaults(func=cmd_slope_vs_alpha)

    p = subs.add_parser("bounds", help="variational lower / stoquastic upper bounds")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = subs.add_parser("instanton", help="tunneling action over an n range")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--beta", type=float, default=None)
    group.add_argument("--width-one", action="store_true")
    p.add_argument("--cubic-q", type=float, default=None,
                   help="use the cubic cost with this barrier coefficient")
    p.add_argument("--s-hint", type=float, default=None)
    p.set_defaults(func=cmd_instanton)

    p = subs.add_parser("wkb", help="discrete WKB gap estimate")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_wkb)

    p = subs.add_parser("crossings", help="predict (and verify) avoided crossings")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t-max", type=int, default=5)
    p.add_argument("--all-nodes", action="store_true",
                   help="sweep i = 1..t instead of i = 1 only")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_crossings)

    p = subs.add_parser("classify", help="power-law vs superpolynomial verdict")
    _add_common(p, n_help="geometric n grid, e.g. 500:30000:geometric:24")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        kind, payload, rows, status = args.func(args)
    except (SpikegapError, ValueError) as exc:
        parser.exit(2, f"spikegap: error: {exc}\n")
    _write_output(kind, payload, rows, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
