"""Command line entry point: ``permcorr <verb> ...``.

Exit codes: 0 success, 1 invariant violation, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from .engine import (
    correlate, open_question_experiment, scan_up_set_pairs, t_up_set_experiment, thm2_sweep,
)
from .measures import to_number
from .orders import parse_order
from .specs import SpecError, load_json_arg, parse_family, parse_measure

EXIT_OK, EXIT_VIOLATION, EXIT_BAD_INPUT = 0, 1, 2


class BadInput(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise BadInput(f"expected a comma-separated integer list, got {text!r}") from exc


def _seed(args) -> np.random.Generator:
    if args.seed is None:
        raise BadInput(f"'{args.command}' needs --seed for reproducibility")
    return np.random.default_rng(args.seed)


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not serialisable: {o!r}")


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=2, default=_default)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_rows(rows: list[dict], columns: list[str], out: str | None) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _default(v) if isinstance(v, (Fraction, np.generic)) else v
                             for k, v in row.items()})
    finally:
        if out:
            fh.close()


def cmd_correlate(args) -> int:
    exact = True if args.exact else (False if args.float else None)
    mu = parse_measure(load_json_arg(args.measure), args.n, exact=exact)
    spec_a, spec_b = load_json_arg(args.family_a), load_json_arg(args.family_b)
    rep = correlate(mu, parse_family(spec_a, args.n), parse_family(spec_b, args.n),
                    specs=[spec_a, spec_b])
    _emit(rep.to_dict())
    return EXIT_OK


def cmd_scan(args) -> int:
    order = parse_order(args.order)
    mu = parse_measure(load_json_arg(args.measure), args.n)
    if args.mode == "exhaustive":
        rep = scan_up_set_pairs(args.n, order, mu, "exhaustive", limit=args.limit,
                                workers=args.workers)
    else:
        density = args.density
        if args.density_range:
            density = tuple(float(x) for x in args.density_range.split(","))
        rep = scan_up_set_pairs(args.n, order, mu, "random", pairs=args.pairs,
                                density=density, rng=_seed(args))
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_thm2(args) -> int:
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    n_list = _int_list(args.n_list)
    if any(n > 10 for n in n_list) and rng is None:
        raise BadInput("n > 10 uses Monte Carlo and needs --seed")
    rows = thm2_sweep(to_number(args.alpha), to_number(args.beta), n_list, rng=rng)
    _write_rows(rows, ["n", "density_a", "density_b", "density_ab", "lower_bound"], args.out)
    return EXIT_OK


def cmd_openq(args) -> int:
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    if args.source == "random" and rng is None:
        raise BadInput("random pair source needs --seed")
    rep = open_question_experiment(args.q, args.n, to_number(args.qparam), args.source,
                                   rng=rng, pairs=args.pairs)
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_tscan(args) -> int:
    rng = _seed(args)
    t_list = _int_list(args.t_list) if args.t_list else list(range(1, args.n + 1))
    density = tuple(float(x) for x in args.density.split(",")) if "," in args.density \
        else float(args.density)
    rows = t_up_set_experiment(args.n, t_list, density, args.trials, rng)
    _write_rows(rows, ["t", "trials", "min_slack", "mean_slack", "negative_fraction"], args.out)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    results = run_selfcheck(args.seed if args.seed is not None else 20240101)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<28} {r.seconds:7.2f}s  {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="permcorr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("correlate", help="exact mu(A&B) against mu(A) mu(B)")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--measure", required=True, help="measure JSON (file or inline)")
    c.add_argument("--family-a", required=True)
    c.add_argument("--family-b", required=True)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--float", action="store_true")
    c.set_defaults(func=cmd_correlate)

    s = sub.add_parser("scan", help="minimum slack over up-set pairs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--order", default="strong", help="strong | weak | grid | t:K")
    s.add_argument("--measure", default='{"measure":"uniform"}')
    s.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    s.add_argument("--pairs", type=int, default=1000)
    s.add_argument("--limit", type=int, default=None, help="cap on enumerated up-sets")
    s.add_argument("--density", type=float, default=0.3)
    s.add_argument("--density-range", default=None, help="lo,hi for log-uniform seed density")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("thm2", help="densities of the anti-correlated weak up-sets")
    t.add_argument("--alpha", required=True)
    t.add_argument("--beta", required=True)
    t.add_argument("--n-list", default="4,6,8,10")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_thm2)

    o = sub.add_parser("openq", help="evidence for the spatial-measure questions")
    o.add_argument("--q", type=int, choices=[1, 2, 3], required=True)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--qparam", required=True)
    o.add_argument("--source", choices=["structured", "exhaustive", "random"], default="structured")
    o.add_argument("--pairs", type=int, default=1000)
    o.add_argument("--seed", type=int, default=None)
    o.add_argument("--out", default=None)
    o.set_defaults(func=cmd_openq)

    ts = sub.add_parser("tscan", help="uniform slack over random t-up-set pairs")
    ts.add_argument("--n", type=int, required=True)
    ts.add_argument("--t-list", default=None)
    ts.add_argument("--trials", type=int, default=1000)
    ts.add_argument("--density", default="0,0.3", help="seed density or lo,hi range")
    ts.add_argument("--seed", type=int, default=None)
    ts.add_argument("--out", default=None)
    ts.set_defaults(func=cmd_tscan)

    sc = sub.add_parser("selfcheck", help="run the invariant suite")
    sc.add_argument("--seed", type=int, default=None)
    sc.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (BadInput, SpecError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
