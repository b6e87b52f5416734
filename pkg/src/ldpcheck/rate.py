"""Rate function via inf_{lam >= 0} (p(lam) - lam x) with boundary case analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .distributions import DistributionSpec, atom_mass, essential_sup, mean
from .extreal import NEG_INF, POS_INF, ExtendedReal
from .pressure import pressure, pressure_derivative

LAMBDA_CAP = 1e6
DERIV_RTOL = 1e-10
BRACKET_ATOL = 1e-12

CASES = ("at_or_below_mean", "interior", "boundary_c", "above_c")


@dataclass(frozen=True)
class RateResult:
    x: float
    limit_value: ExtendedReal
    lambda_star: ExtendedReal
    case_tag: str

    @property
    def rate(self) -> ExtendedReal:
        return 0.0 - self.limit_value


def optimize_lambda(spec: DistributionSpec, x: float) -> ExtendedReal:
    """Minimizer over lam >= 0 of p(lam) - lam x.

    Bisects on p'(lam) - x after bracketing by doubling from 1. Returns ``inf``
    when the infimum is only approached as lam grows (x at or past the
    essential supremum, or no sign change below the cap).
    """
    if x <= mean(spec):
        return 0.0
    if x >= essential_sup(spec):
        return POS_INF
    tol = DERIV_RTOL * max(1.0, abs(x))

    lo, hi = 0.0, 1.0
    for _ in range(4000):
        # pull hi back inside the MGF domain, halving toward lo
        while not math.isfinite(pressure(spec, hi)):
            hi = lo + 0.5 * (hi - lo)
        d = pressure_derivative(spec, hi) - x
        if abs(d) <= tol:
            return hi
        if d > 0:
            break
        lo, hi = hi, 2.0 * hi
        if lo >= LAMBDA_CAP:
            return POS_INF
    else:
        return POS_INF

    while True:
        mid = 0.5 * (lo + hi)
        d = pressure_derivative(spec, mid) - x
        if abs(d) <= tol or hi - lo <= BRACKET_ATOL or mid in (lo, hi):
            return mid
        if d > 0:
            hi = mid
        else:
            lo = mid


def rate(spec: DistributionSpec, x: float) -> RateResult:
    if x <= mean(spec):
        return RateResult(x, 0.0, 0.0, "at_or_below_mean")
    c = essential_sup(spec)
    if x > c:
        return RateResult(x, NEG_INF, POS_INF, "above_c")
    if x == c:
        # lam -> inf asymptote of p(lam) - lam c is log P(X_1 = c)
        w = atom_mass(spec, c)
        return RateResult(x, math.log(w) if w > 0 else NEG_INF, POS_INF, "boundary_c")
    lam = optimize_lambda(spec, x)
    if math.isinf(lam):
        # no stationary point below the cap; report the objective there
        lam_eval = LAMBDA_CAP
        while not math.isfinite(pressure(spec, lam_eval)):
            lam_eval *= 0.5
        val = pressure(spec, lam_eval) - lam_eval * x
    else:
        val = pressure(spec, lam) - lam * x
    return RateResult(x, min(0.0, val), lam, "interior")


def rate_curve(spec: DistributionSpec, x_grid: Sequence[float]) -> list[RateResult]:
    if len(x_grid) == 0:
        raise ValueError("x_grid must be non-empty")
    return [rate(spec, float(x)) for x in x_grid]
