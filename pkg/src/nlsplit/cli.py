"""Command line entry point: ``nlsplit {converge,probe,check,projection-gap}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .checks import run_all
from .convergence import load_config, projection_gap, run_ladder
from .errors import ParameterError
from .probes import CATALOG, Ensemble, inequality_probe


def _config(path):
    return load_config(Path(path).read_text())


def _write(text, path):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_converge(args) -> int:
    cfg = _config(args.config)
    if args.max_over_time:
        cfg = replace(cfg, max_over_time=True)
    report = run_ladder(cfg, gate=not args.no_gate, workers=args.workers)
    if args.csv:
        _write(report.to_csv(), args.csv)
    if args.json:
        _write(report.to_json() + "\n", args.json)
    ok = True
    if report.gate_passed is not None:
        print(f"reference change {report.reference_change:.3e} (limit {report.gate_threshold:.3e})", file=sys.stderr)
        ok = report.gate_passed
    for name, r in report.results.items():
        fit = r.fit
        if fit is None:
            print(f"{name}: no fit ({len(r.failures)} divergent rungs)", file=sys.stderr)
            continue
        print(f"{name}: slope {fit.slope:.4f} +- {fit.stderr:.4f} {fit.flag}".rstrip(), file=sys.stderr)
        if args.expect and name in args.expect:
            lo, hi = args.expect[name]
            hit = lo <= fit.slope <= hi
            print(f"  expected [{lo}, {hi}]: {'PASS' if hit else 'FAIL'}", file=sys.stderr)
            ok = ok and hit
    return 0 if ok else 1


def _expectations(values):
    out = {}
    for item in values or ():
        try:
            name, lo, hi = item.split(":")
            out[name] = (float(lo), float(hi))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected SCHEME:LO:HI, got {item!r}")
    return out


def cmd_probe(args) -> int:
    names = args.names or sorted(CATALOG)
    kw = {"count": args.count, "seed": args.seed, "num_modes": args.K}
    if args.taus:
        kw["tau_list"] = tuple(2.0**-m for m in args.taus)
    ens = Ensemble(**kw)
    ok = True
    for name in names:
        report = inequality_probe(name, ens)
        if args.json:
            print(report.to_json())
        else:
            print(f"{name:10s} growth {report.growth:8.3f}  max ratio {report.max_ratio:.4g}  {report.verdict}")
        ok = ok and report.verdict == "bounded"
    return 0 if ok else 1


def cmd_check(args) -> int:
    ok = True
    for name, value, limit, passed in run_all():
        print(f"{name:18s} {value:.3e} <= {limit:.0e}  {'PASS' if passed else 'FAIL'}")
        ok = ok and passed
    return 0 if ok else 1


def cmd_projection_gap(args) -> int:
    cfg = _config(args.config)
    points, fit = projection_gap(cfg)
    for tau, gap in points:
        print(f"{tau!r},{'' if gap is None else repr(gap)}")
    if fit is None:
        print("fewer than three positive gaps; no slope", file=sys.stderr)
        return 0
    print(f"slope {fit.slope:.4f} +- {fit.stderr:.4f}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlsplit", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("converge", help="run a step-size ladder from a config file")
    c.add_argument("config")
    c.add_argument("--csv", help="write the error table here ('-' for stdout)")
    c.add_argument("--json", help="write the full report here ('-' for stdout)")
    c.add_argument("--max-over-time", action="store_true", help="worst error over all steps instead of final time")
    c.add_argument("--no-gate", action="store_true", help="skip the reference-quality check")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--expect", nargs="*", metavar="SCHEME:LO:HI", help="slope windows that must hold")
    c.set_defaults(func=cmd_converge)

    pr = sub.add_parser("probe", help="run Bourgain-space inequality probes")
    pr.add_argument("names", nargs="*", metavar="NAME", help=f"catalog keys (default all): {', '.join(sorted(CATALOG))}")
    pr.add_argument("--count", type=int, default=64)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--K", type=int, default=16)
    pr.add_argument("--taus", type=int, nargs="+", metavar="M", help="step sizes 2^-M")
    pr.add_argument("--json", action="store_true")
    pr.set_defaults(func=cmd_probe)

    ch = sub.add_parser("check", help="structural identity checks")
    ch.set_defaults(func=cmd_check)

    g = sub.add_parser("projection-gap", help="gap between projected and full dynamics")
    g.add_argument("config")
    g.set_defaults(func=cmd_projection_gap)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "converge":
        try:
            args.expect = _expectations(args.expect)
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    try:
        return args.func(args)
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
