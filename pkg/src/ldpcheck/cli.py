"""``ldpcheck`` command line: rate, tail, converge, dual, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
Finite reals are written with 17 significant digits; infinities as
``inf``/``-inf`` in both CSV and JSON.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .distributions import DistributionSpec, essential_inf, essential_sup, parse_spec
from .entropy import dual_max, dual_sup, entropy_curve
from .extreal import fmt, to_json
from .pressure import pressure
from .rate import rate_curve
from .tail import METHODS, tail
from .verify import run_verify


class UsageError(ValueError):
    pass


def parse_grid(text: str) -> list[float]:
    """``A:B:STEP`` (inclusive of A; of B when (B-A)/STEP is integral within
    1e-9) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be A:B:STEP, got {text!r}")
        try:
            a, b, step = (float(p) for p in parts)
        except ValueError:
            raise UsageError(f"bad number in grid {text!r}") from None
        if not step > 0 or b < a:
            raise UsageError(f"grid needs STEP > 0 and B >= A, got {text!r}")
        k = (b - a) / step
        kr = round(k)
        if abs(k - kr) <= 1e-9:
            return [a + i * step for i in range(kr)] + [b]
        return [a + i * step for i in range(math.floor(k) + 1)]
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad number in list {text!r}") from None


def parse_ints(text: str) -> list[int]:
    vals = parse_grid(text)
    if any(v != int(v) or v < 1 for v in vals):
        raise UsageError(f"expected positive integers, got {text!r}")
    return [int(v) for v in vals]


def _cell(v):
    if isinstance(v, float):
        return fmt(v)
    return v


def emit(rows: list[dict], columns: list[str], args) -> None:
    if args.format == "json":
        data = [{c: to_json(r[c]) if isinstance(r[c], float) else r[c] for c in columns} for r in rows]
        text = json.dumps(data, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_rate(args, spec: DistributionSpec) -> int:
    rows = [
        {"x": r.x, "limit_value": r.limit_value, "rate": r.rate, "lambda_star": r.lambda_star, "case_tag": r.case_tag}
        for r in rate_curve(spec, parse_grid(args.x))
    ]
    emit(rows, ["x", "limit_value", "rate", "lambda_star", "case_tag"], args)
    return 0


def cmd_tail(args, spec: DistributionSpec) -> int:
    if args.method == "exact" and not spec.is_finite:
        raise UsageError(f"method exact needs a finite-support law, got {spec.kind}")
    e = tail(spec, args.n, args.x, args.method, args.trials, args.seed)
    row = {"n": e.n, "x": e.x, "prob": e.prob, "log_prob": e.log_prob, "stderr": e.stderr, "method": e.method,
           "lambda_used": e.lambda_used, "trials": e.trials, "seed": e.seed}
    emit([row], list(row), args)
    return 0


def cmd_converge(args, spec: DistributionSpec) -> int:
    if args.method == "exact" and not spec.is_finite:
        raise UsageError(f"method exact needs a finite-support law, got {spec.kind}")
    curve = entropy_curve(spec, [args.x], parse_ints(args.n_list), args.method, args.trials, args.seed)
    pred = float(curve.predicted[0])
    rows = []
    for i, n in enumerate(curve.n_list):
        s = float(curve.values[i, 0])
        gap = 0.0 if s == pred else abs(pred - s)
        rows.append({"n": n, "s_n": s, "sup_so_far": float(curve.running_sup[i, 0]), "predicted_limit": pred,
                     "abs_gap": gap})
    emit(rows, ["n", "s_n", "sup_so_far", "predicted_limit", "abs_gap"], args)
    return 0


def cmd_dual(args, spec: DistributionSpec) -> int:
    if args.source == "exact" and not spec.is_finite:
        raise UsageError(f"source exact needs a finite-support law, got {spec.kind}")
    lams = parse_grid(args.lambdas)
    if any(l < 0 for l in lams):
        raise UsageError("lambda values must be non-negative")
    if any(math.isinf(pressure(spec, l)) for l in lams):
        raise UsageError("pressure is infinite at some requested lambda")
    if args.source == "exact":
        lo, hi = essential_inf(spec), essential_sup(spec)
        u = np.linspace(lo, hi, int(round((hi - lo) / args.step)) + 1)
        curve = entropy_curve(spec, u, range(1, args.n_max + 1), "exact")
    rows = []
    for l in lams:
        if args.source == "exact":
            best, at = dual_max(spec, l, curve, "sup")
        else:
            best, at = dual_sup(spec, l, step=args.step, refine=False)
        p = pressure(spec, l)
        rows.append({"lambda": l, "pressure": p, "sup_value": best, "argmax_u": at, "gap": p - best,
                     "source": args.source})
    emit(rows, ["lambda", "pressure", "sup_value", "argmax_u", "gap", "source"], args)
    return 0


def cmd_verify(args, spec: DistributionSpec) -> int:
    rows = run_verify(spec, args.seed)
    out = [{"property": r.name, "status": r.status, "worst_margin": r.margin if r.status != "SKIP" else "",
            "detail": r.detail} for r in rows]
    emit(out, ["property", "status", "worst_margin", "detail"], args)
    return 1 if any(r.status == "FAIL" for r in rows) else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dist", required=True, help="law of X_1, e.g. bernoulli:0.5 or discrete:-1:0.5,2:0.5")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    ap = argparse.ArgumentParser(prog="ldpcheck", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", parents=[common], help="limit of (1/n) log P(mean_n >= x)")
    p.add_argument("--x", required=True, help="A:B:STEP or comma list (use --x=-1:1:0.5 for negatives)")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("tail", parents=[common], help="estimate P(mean_n >= x)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--method", choices=METHODS, default="exact")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("converge", parents=[common], help="s_n(x) against the predicted limit")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--n-list", default="1,2,4,8,16,32,64")
    p.add_argument("--method", choices=METHODS, default="exact")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("dual", parents=[common], help="p(lambda) - max_u (lambda u + s(u))")
    p.add_argument("--lambda", dest="lambdas", default="0,0.25,0.5,1,2")
    p.add_argument("--source", choices=("predicted", "exact"), default="predicted")
    p.add_argument("--step", type=float, default=1e-3, help="u-grid step")
    p.add_argument("--n-max", type=int, default=64, help="largest n for --source exact")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("verify", parents=[common], help="run the property suite")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = parse_spec(args.dist)
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        if getattr(args, "n", 1) < 1:
            raise UsageError("--n must be >= 1")
        return args.func(args, spec)
    except ValueError as e:
        print(f"ldpcheck: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
