"""Property suite behind ``ldpcheck verify``.

Each check returns a :class:`~ldpcheck.entropy.Check`, or ``None`` when it
needs exact tails and the law is continuous (reported as SKIP).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionSpec, essential_inf, essential_sup, iter_sum_distributions, mean, variance
from .entropy import Check, concatenation_check, dual_gap, dual_sup, entropy_curve, shape_check
from .pressure import domain_sup, pressure, pressure_derivative, truncated_pressure
from .rate import rate, rate_curve
from .tail import chunk_seed, tail_exact, tail_tilted

N_MAX = 64


@dataclass
class VerifyRow:
    name: str
    status: str
    margin: float
    detail: str


def _lambda_grid(spec: DistributionSpec, lo: float = -3.0, hi: float = 3.0, num: int = 25) -> np.ndarray:
    top = min(hi, 0.9 * domain_sup(spec))
    return np.linspace(lo, top, num)


def _support_grid(spec: DistributionSpec, num: int) -> np.ndarray:
    return np.linspace(essential_inf(spec), essential_sup(spec), num)


def _x_grid(spec: DistributionSpec, num: int = 41) -> np.ndarray:
    m, sd = mean(spec), math.sqrt(variance(spec))
    lo = max(m - 2 * sd, essential_inf(spec))
    hi = min(m + 4 * sd, essential_sup(spec))
    return np.linspace(lo, hi, num)


def check_pressure_convexity(spec, seed):
    lams = _lambda_grid(spec)
    p = np.array([pressure(spec, l) for l in lams])
    worst = math.inf
    for i in range(lams.size):
        for j in range(i + 1, lams.size):
            for t in (0.25, 0.5, 0.75):
                mid = pressure(spec, t * lams[i] + (1 - t) * lams[j])
                worst = min(worst, t * p[i] + (1 - t) * p[j] - mid)
    return Check("pressure_convexity", worst >= -1e-9, worst, f"{lams.size} lambdas")


def check_pressure_derivative(spec, seed):
    h = 1e-5
    worst = 0.0
    for l in _lambda_grid(spec, num=13)[1:-1]:
        fd = (pressure(spec, l + h) - pressure(spec, l - h)) / (2 * h)
        worst = max(worst, abs(pressure_derivative(spec, l) - fd))
    return Check("pressure_derivative", worst <= 1e-5, 1e-5 - worst, f"max error {worst:.3g}")


def check_rate_shape(spec, seed):
    xs = _x_grid(spec)
    res = rate_curve(spec, xs)
    vals = np.array([r.limit_value for r in res])
    worst = math.inf
    for a, b in zip(vals, vals[1:]):
        if b > -math.inf:
            worst = min(worst, a - b)
    for i in range(1, xs.size - 1):
        a, b, c = vals[i - 1:i + 2]
        if math.isfinite(a) and math.isfinite(c):
            t = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1])
            worst = min(worst, b - ((1 - t) * a + t * c))
    grad = 0.0
    m = mean(spec)
    for r in res:
        if r.x <= m and r.limit_value != 0.0:
            return Check("rate_shape", False, -abs(r.limit_value), f"nonzero limit at x={r.x} <= mean")
        if r.case_tag == "interior" and math.isfinite(r.lambda_star):
            err = abs(pressure_derivative(spec, r.lambda_star) - r.x) / max(1.0, abs(r.x))
            grad = max(grad, err)
    ok = worst >= -1e-9 and grad <= 1e-8
    return Check("rate_shape", ok, min(worst, 1e-8 - grad), f"max relative gradient {grad:.3g}")


def check_chernoff_bound(spec, seed):
    if not spec.is_finite:
        return None
    xs = _support_grid(spec, 50)
    lams = np.linspace(0.0, 5.0, 30)
    bound = np.array([[pressure(spec, l) - l * x for x in xs] for l in lams])
    worst = math.inf
    for sd in iter_sum_distributions(spec, range(1, N_MAX + 1)):
        lhs = np.array([sd.log_tail_mean(x) / sd.n for x in xs])
        worst = min(worst, float(np.min(bound - lhs[None, :])))
    return Check("chernoff_bound", worst >= -1e-12, worst, f"n=1..{N_MAX}, 50 x, 30 lambda")


def _exact_curve(spec):
    return entropy_curve(spec, _support_grid(spec, 25), range(1, N_MAX + 1), "exact")


def check_entropy_shape(spec, seed):
    if not spec.is_finite:
        return None
    rep = shape_check(_exact_curve(spec))
    req = [c for c in rep.checks if c.required]
    worst = min(c.margin for c in req)
    failed = [c.name for c in req if not c.passed]
    return Check("entropy_shape", rep.ok, worst, "failed: " + ",".join(failed) if failed else
                 "non-increasing, concave limit, sup_n s_n <= limit")


def check_convergence(spec, seed):
    if not spec.is_finite:
        return None
    c = essential_sup(spec)
    x = mean(spec) + 0.5 * (c - mean(spec))
    ns = [2 ** k for k in range(7)]
    curve = entropy_curve(spec, [x], ns, "exact")
    s = curve.values[:, 0]
    pred = float(curve.predicted[0])
    upper = float(np.min(pred - s))
    doubling = float(np.min(np.diff(s)))
    ok = upper >= -1e-12 and doubling >= -1e-12
    return Check("convergence", ok, min(upper, doubling),
                 f"x={x:.6g} predicted={pred:.6g} s_{ns[-1]}={s[-1]:.6g}")


def check_concatenation(spec, seed, count=200):
    if not spec.is_finite:
        return None
    rng = np.random.default_rng(chunk_seed(seed, 7))
    lo, hi = essential_inf(spec), essential_sup(spec)
    cache = {}
    worst = math.inf
    bad = 0
    for _ in range(count):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(m, 25))
        x, y = sorted(rng.uniform(lo, hi, 2))
        alpha = float(rng.uniform(0.01, 0.99))
        r = concatenation_check(spec, m, n, float(x), float(y), alpha, cache)
        worst = min(worst, r.margin)
        bad += not r.holds
    return Check("concatenation", bad == 0, worst, f"{count} tuples, {bad} violations")


def check_dual_gap_positive(spec, seed):
    if not spec.is_finite:
        return None
    curve = _exact_curve(spec)
    gaps = [dual_gap(spec, l, curve, "sup") for l in np.linspace(0.0, 3.0, 13)]
    worst = min(gaps)
    return Check("dual_gap_positive", worst >= -1e-12, worst, "exact sup_n s_n, lambda in [0, 3]")


def _dual_lambdas(spec):
    return [l for l in (0.25, 0.5, 1.0, 2.0) if l < 0.9 * domain_sup(spec)]


def check_dual_gap_vanishing(spec, seed):
    worst_lo, worst_hi = math.inf, -math.inf
    for l in _dual_lambdas(spec):
        best, _ = dual_sup(spec, l, step=1e-3, refine=False)
        g = pressure(spec, l) - best
        worst_lo, worst_hi = min(worst_lo, g), max(worst_hi, g)
    ok = worst_lo >= 0 and worst_hi <= 1e-3
    return Check("dual_gap_vanishing", ok, min(worst_lo, 1e-3 - worst_hi),
                 f"predicted s, u-step 1e-3, gap in [{worst_lo:.3g}, {worst_hi:.3g}]")


def check_truncated_pressure(spec, seed):
    worst = math.inf
    mono = math.inf
    for l in [l for l in (0.5, 1.0, 2.0) if l < 0.9 * domain_sup(spec)]:
        sup, _ = dual_sup(spec, l)
        prev = -math.inf
        for K in (1.0, 2.0, 5.0, 10.0, 50.0):
            if not -l * K < sup:
                continue
            tp = truncated_pressure(spec, l, K)
            worst = min(worst, sup + 1e-6 - tp)
            mono = min(mono, tp - prev)
            prev = tp
    ok = worst >= 0 and mono >= -1e-12
    return Check("truncated_pressure", ok, min(worst, mono), "p_K(lambda) <= sup_u(lambda u + s(u)), monotone in K")


def check_importance_sampling(spec, seed):
    if not spec.is_finite:
        return None
    n = 20
    x = mean(spec) + 0.4 * (essential_sup(spec) - mean(spec))
    ex = tail_exact(spec, n, x).prob
    est = tail_tilted(spec, n, x, 20_000, chunk_seed(seed, 11))
    z = abs(est.prob - ex) / est.stderr if est.stderr > 0 else (0.0 if est.prob == ex else math.inf)
    return Check("importance_sampling", z <= 5.0, 5.0 - z, f"n={n} x={x:.6g} |z|={z:.3g}")


CHECKS = (
    check_pressure_convexity,
    check_pressure_derivative,
    check_rate_shape,
    check_chernoff_bound,
    check_entropy_shape,
    check_convergence,
    check_concatenation,
    check_dual_gap_positive,
    check_dual_gap_vanishing,
    check_truncated_pressure,
    check_importance_sampling,
)


def run_verify(spec: DistributionSpec, seed: int = 0) -> list[VerifyRow]:
    rows = []
    for fn in CHECKS:
        c = fn(spec, seed)
        name = fn.__name__.removeprefix("check_")
        if c is None:
            rows.append(VerifyRow(name, "SKIP", math.nan, "needs finite support"))
        else:
            rows.append(VerifyRow(name, "PASS" if c.passed else "FAIL", c.margin, c.detail))
    return rows
