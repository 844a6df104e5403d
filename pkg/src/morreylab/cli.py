"""Command-line entry point: ``morreylab <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, norms, operators, predual
from .grid import GridSpec, sample
from .norms import MorreyParams, PredualParams


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return a, b


def _grid(args) -> GridSpec:
    return GridSpec(args.dim, args.half_width, args.points)


def _scalar(v):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _emit(obj) -> None:
    print(json.dumps(harness._jsonable(obj), indent=2, sort_keys=True))


def cmd_norm(args) -> int:
    g = _grid(args)
    f = sample(args.expr, g)
    p, r = args.space
    params = MorreyParams(p, r)
    if args.kind == "dyadic":
        res = norms.morrey_norm_dyadic(f, params)
    elif args.kind == "ball":
        res = norms.morrey_norm_ball(f, params)
    else:
        res = norms.NormResult("lp", norms.lp_norm(f, p), {"p": p}, None, None, g.to_dict())
    _emit(res.to_dict())
    return 0


def cmd_predual(args) -> int:
    g = _grid(args)
    f = sample(args.expr, g)
    params = PredualParams(*args.space)
    up = predual.predual_upper_bound(f, params)
    lo = predual.predual_lower_bound(f, params, upper=up)
    out = lo.to_dict()
    out["weak_duality_ok"] = lo.weak_duality_ok
    if args.atoms:
        out["atoms"] = up.to_list()
    out["resolution"] = g.to_dict()
    _emit(out)
    return 0 if lo.weak_duality_ok else 1


def cmd_apply(args) -> int:
    g = _grid(args)
    op = operators.OperatorSpec.from_dict(json.loads(args.op))
    f = sample(args.expr, g)
    tf = operators.apply_operator(op, f)
    out = {"operator": op.to_dict(), "function": args.expr, "resolution": g.to_dict(),
           "sup": float(tf.abs().max()), "l2": norms.lp_norm(tf, 2.0)}
    if args.at:
        idx = {x: int(np.argmin(np.abs(g.axis - x))) for x in args.at}
        out["values"] = {str(x): _scalar(tf.values[(i,) * g.dim]) for x, i in idx.items()}
    if args.out:
        np.savetxt(args.out, np.column_stack([g.axis, tf.values.real, tf.values.imag])
                   if g.dim == 1 else tf.abs(), delimiter=",")
    _emit(out)
    return 0


def cmd_bound_ratio(args) -> int:
    g = _grid(args)
    op = operators.OperatorSpec.from_dict(json.loads(args.op))
    space = args.space
    sp = MorreyParams(*space) if len(space) == 2 else float(space[0])
    corpus = args.corpus or list(harness.default_corpus(g.dim))
    tab = harness.bound_ratio(op, sp, corpus, [g.refined(2**k) if k else g for k in range(args.refinements + 1)])
    _emit(tab.to_dict())
    return 0


def cmd_check(args) -> int:
    cfg = harness.ExperimentConfig.from_json(args.config)
    if args.output:
        cfg.output_path = args.output
    rep = harness.run(cfg)
    failed = [r for r in rep.records if not r.passed]
    print(f"{len(rep.records)} records, {len(failed)} failed")
    for r in failed:
        print(f"FAIL {r.check} {r.function} {r.operator} value={r.value}")
    if cfg.output_path:
        print(f"wrote {cfg.output_path}")
    return 1 if failed else 0


def cmd_report(args) -> int:
    data = json.loads(Path(args.report).read_text())
    recs = data["records"]
    if args.csv:
        sys.stdout.write(harness.records_to_csv(recs))
        return 0
    by = {}
    for r in recs:
        s = by.setdefault(r["check"], [0, 0])
        s[0] += 1
        s[1] += 0 if r["pass"] else 1
    for name, (n, bad) in by.items():
        print(f"{name:26s} {n:5d} records  {bad:3d} failed")
    return 0


def _space_arg(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morreylab", description="Morrey-space numerical lab")
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--half-width", type=float, default=8.0)
    ap.add_argument("--points", type=int, default=1024, help="grid points per axis (power of two)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("norm", help="Morrey or L_p norm of an expression")
    s.add_argument("expr")
    s.add_argument("--space", type=_pair, required=True, metavar="p,r")
    s.add_argument("--kind", choices=("dyadic", "ball", "lp"), default="dyadic")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("predual", help="predual norm bracket")
    s.add_argument("expr")
    s.add_argument("--space", type=_pair, required=True, metavar="p,rho")
    s.add_argument("--atoms", action="store_true", help="include the atom list")
    s.set_defaults(func=cmd_predual)

    s = sub.add_parser("apply", help="apply an operator given as JSON")
    s.add_argument("op", help='e.g. \'{"kind": "hilbert"}\'')
    s.add_argument("expr")
    s.add_argument("--at", type=float, nargs="*", help="report values at these points")
    s.add_argument("--out", help="write node values as CSV")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("bound-ratio", help="||Tf|| / ||f|| over a corpus")
    s.add_argument("--op", required=True)
    s.add_argument("--space", type=_space_arg, default=(2.0, -0.25), metavar="p[,r]")
    s.add_argument("--corpus", nargs="*")
    s.add_argument("--refinements", type=int, default=1)
    s.set_defaults(func=cmd_bound_ratio)

    s = sub.add_parser("check", help="run an experiment config")
    s.add_argument("config")
    s.add_argument("--output", help="report JSON path (CSV is written beside it)")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("report", help="summarize a report JSON")
    s.add_argument("report")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
