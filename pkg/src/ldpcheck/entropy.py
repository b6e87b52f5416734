"""Entropy curves s_n(x) = (1/n) log P(mean_n >= x) and structural checks.

s is held two ways: the running supremum over the computed n (from exact or
Monte Carlo tails) and the predicted limit from :func:`ldpcheck.rate.rate`.
Every check says which one it reads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .distributions import (
    DistributionSpec,
    essential_inf,
    essential_sup,
    iter_sum_distributions,
    mean,
)
from .extreal import NEG_INF, ExtendedReal, ext_scale
from .pressure import pressure, pressure_derivative
from .rate import rate, rate_curve
from .tail import chunk_seed, tail

CONCAT_SLACK = 1e-10
SHAPE_SLACK = 1e-9
UPPER_SLACK = 1e-12


@dataclass(frozen=True)
class EntropyCurve:
    """``values[i, j]`` is s_{n_list[i]}(x_grid[j]); ``running_sup[i]`` is the
    max over the first i+1 rows and ``sup_values`` its last row."""

    x_grid: np.ndarray
    n_list: tuple[int, ...]
    values: np.ndarray
    running_sup: np.ndarray
    predicted: np.ndarray
    estimator_method: str
    stderr: np.ndarray | None = None

    @property
    def sup_values(self) -> np.ndarray:
        return self.running_sup[-1]


def entropy_curve(spec: DistributionSpec, x_grid: Sequence[float], n_list: Sequence[int],
                  method: str = "exact", trials: int = 100_000, seed: int = 0) -> EntropyCurve:
    xs = np.asarray(sorted(float(x) for x in x_grid))
    ns = tuple(sorted(int(n) for n in n_list))
    if xs.size == 0 or not ns:
        raise ValueError("x_grid and n_list must be non-empty")
    vals = np.empty((len(ns), xs.size))
    se = None
    if method == "exact":
        for i, sd in enumerate(iter_sum_distributions(spec, ns)):
            vals[i] = [sd.log_tail_mean(x) / sd.n for x in xs]
    else:
        se = np.zeros_like(vals)
        for i, n in enumerate(ns):
            for j, x in enumerate(xs):
                est = tail(spec, n, float(x), method, trials, chunk_seed(chunk_seed(seed, i), j))
                vals[i, j] = est.log_prob / n
                se[i, j] = est.stderr
    pred = np.array([r.limit_value for r in rate_curve(spec, xs)])
    return EntropyCurve(xs, ns, vals, np.maximum.accumulate(vals, axis=0), pred, method, se)


@dataclass
class Check:
    """One verified property; ``margin`` is the worst slack (negative = violated)."""

    name: str
    passed: bool
    margin: float
    detail: str = ""
    required: bool = True

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.margin = float(self.margin)


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


# concatenation inequality

@dataclass(frozen=True)
class ConcatenationReport:
    m: int
    n: int
    q: int
    r: int
    x: float
    y: float
    alpha: float
    left: ExtendedReal
    right: ExtendedReal

    @property
    def holds(self) -> bool:
        if self.right == NEG_INF:
            return True
        return self.left >= self.right - CONCAT_SLACK

    @property
    def margin(self) -> float:
        if self.right == NEG_INF:
            return math.inf
        return self.left - self.right


def concatenation_check(spec: DistributionSpec, m: int, n: int, x: float, y: float, alpha: float,
                        cache: dict | None = None) -> ConcatenationReport:
    """log P(mean_n >= a x + (1-a) y) against the log of
    P(mean_m >= x)^floor(a q) P(mean_m >= y)^(q - floor(a q)) P(X_1 >= y)^r,
    with n = m q + r.

    ``cache`` maps n to exact sum laws and may be shared across calls.
    """
    if x > y:
        raise ValueError(f"need x <= y, got x={x}, y={y}")
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    cache = {} if cache is None else cache
    missing = sorted({1, m, n} - cache.keys())
    if missing:
        for sd in iter_sum_distributions(spec, missing):
            cache[sd.n] = sd
    q, r = divmod(n, m)
    a = math.floor(alpha * q)
    left = cache[n].log_tail_mean(alpha * x + (1 - alpha) * y)
    right = (ext_scale(a, cache[m].log_tail_mean(x))
             + ext_scale(q - a, cache[m].log_tail_mean(y))
             + ext_scale(r, cache[1].log_tail_mean(y)))
    return ConcatenationReport(m, n, q, r, x, y, alpha, left, right)


# shape of s

def _monotone_margin(v: np.ndarray) -> float:
    """min over consecutive pairs of v[i] - v[i+1]; -inf entries order below all."""
    worst = math.inf
    for a, b in zip(v, v[1:]):
        if b == NEG_INF:
            continue
        worst = min(worst, (a - b) if a != NEG_INF else -math.inf)
    return worst


def _concave_margin(x: np.ndarray, v: np.ndarray) -> float:
    """min over consecutive finite triples of v[mid] - chord(mid)."""
    worst = math.inf
    for i in range(1, len(v) - 1):
        a, b, c = v[i - 1], v[i], v[i + 1]
        if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c)):
            continue
        t = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1])
        worst = min(worst, b - ((1 - t) * a + t * c))
    return worst


def shape_check(curve: EntropyCurve) -> Report:
    """Monotonicity and concavity of the predicted s and of sup_n s_n, and
    sup_n s_n <= predicted.

    Concavity of the finite-n supremum is reported but not required: s_n for a
    lattice law is a step function, so the supremum over finitely many n is
    only concave in the limit.
    """
    rep = Report()
    x, sup, pred = curve.x_grid, curve.sup_values, curve.predicted
    for label, v in (("sup", sup), ("predicted", pred)):
        m = _monotone_margin(v)
        rep.checks.append(Check(f"non_increasing[{label}]", m >= -SHAPE_SLACK, m))
    m = _concave_margin(x, pred)
    rep.checks.append(Check("concave[predicted]", m >= -SHAPE_SLACK, m))
    m = _concave_margin(x, sup)
    rep.checks.append(Check("concave[sup]", m >= -SHAPE_SLACK, m,
                            "finite-n supremum; informational", required=False))
    diff = [p - s for s, p in zip(sup, pred) if s != NEG_INF]
    m = min(diff, default=math.inf)
    rep.checks.append(Check("sup_le_predicted", m >= -UPPER_SLACK, m))
    return rep


# dual equality

def default_u_range(spec: DistributionSpec, lam: float) -> tuple[float, float]:
    """[p'(lam) - 1, p'(lam) + 1] clipped to the support."""
    t = pressure_derivative(spec, lam)
    lo = max(t - 1.0, essential_inf(spec))
    hi = min(t + 1.0, essential_sup(spec))
    return float(lo), float(hi)


def _dual_max(lam: float, u: np.ndarray, s: np.ndarray, spec: DistributionSpec) -> tuple[float, float]:
    obj = np.where(np.isfinite(s), lam * u + np.where(np.isfinite(s), s, 0.0), -np.inf)
    j = int(np.argmax(obj))
    best = float(obj[j])
    if best == NEG_INF:
        raise ValueError("s is -inf on the whole u-grid")
    # maximum on the edge only proves nothing when the objective can keep rising
    # outside the grid: to the left of a point <= mean s is already 0, to the
    # right of c it is -inf
    ties = np.flatnonzero(obj == best)
    if ties[-1] == 0 and u[0] > mean(spec):
        raise ValueError(f"dual maximum at the left grid end u={u[0]}; widen the range")
    if ties[0] == u.size - 1 and u.size > 1 and u[-1] < essential_sup(spec):
        raise ValueError(f"dual maximum at the right grid end u={u[-1]}; widen the range")
    return best, float(u[j])


def dual_max(spec: DistributionSpec, lam: float, curve: EntropyCurve, source: str = "sup") -> tuple[float, float]:
    """max_u (lam u + s(u)) over ``curve.x_grid`` and its argmax.

    ``source`` picks s: ``"sup"`` for the running supremum of s_n,
    ``"predicted"`` for the rate-function value.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if source not in ("sup", "predicted"):
        raise ValueError(f"source must be 'sup' or 'predicted', got {source!r}")
    s = curve.sup_values if source == "sup" else curve.predicted
    return _dual_max(lam, curve.x_grid, s, spec)


def dual_gap(spec: DistributionSpec, lam: float, curve: EntropyCurve, source: str = "sup") -> ExtendedReal:
    """p(lam) - max_u (lam u + s(u)); non-negative up to rounding for exact curves."""
    return pressure(spec, lam) - dual_max(spec, lam, curve, source)[0]


def dual_sup(spec: DistributionSpec, lam: float, lo: float | None = None, hi: float | None = None,
             step: float = 1e-3, refine: bool = True) -> tuple[float, float]:
    """sup_u (lam u + s(u)) with s from the rate function, on a u-grid with
    an optional bounded 1-d refinement around the best grid point.

    Returns ``(value, argmax)``.
    """
    dlo, dhi = default_u_range(spec, lam)
    lo = dlo if lo is None else lo
    hi = dhi if hi is None else hi
    u = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    s = np.array([r.limit_value for r in rate_curve(spec, u)])
    best, at = _dual_max(lam, u, s, spec)
    if refine and lam > 0:
        a, b = max(lo, at - step), min(hi, at + step)
        if b > a:
            res = minimize_scalar(lambda t: -(lam * t + rate(spec, t).limit_value),
                                  bounds=(a, b), method="bounded", options={"xatol": 1e-10})
            if -res.fun > best:
                best, at = float(-res.fun), float(res.x)
    return best, at
