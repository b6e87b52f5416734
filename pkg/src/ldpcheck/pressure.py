"""Pressure p(lam) = log E exp(lam X_1), its derivative and truncated form."""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import expit, logsumexp

from .distributions import DistributionSpec, DomainError
from .extreal import NEG_INF, POS_INF, ExtendedReal


def pressure(spec: DistributionSpec, lam: float) -> ExtendedReal:
    """log E exp(lam X_1); ``inf`` outside the MGF domain."""
    if lam == 0:
        return 0.0
    k, p = spec.kind, spec.params
    if k == "bernoulli":
        return float(np.logaddexp(math.log1p(-p[0]), math.log(p[0]) + lam))
    if k == "gaussian":
        return lam * p[0] + 0.5 * lam * lam * p[1] ** 2
    if k == "exponential":
        if lam >= p[0]:
            return POS_INF
        return math.log(p[0]) - math.log(p[0] - lam)
    if k == "poisson":
        try:
            return p[0] * math.expm1(lam)
        except OverflowError:
            return POS_INF
    v, lw = spec.log_atoms()
    z = lw + lam * v
    zmax = z.max()
    return float(zmax + math.log(np.exp(z - zmax).sum()))


def pressure_derivative(spec: DistributionSpec, lam: float) -> float:
    """Tilted mean E(X e^{lam X}) / E(e^{lam X})."""
    k, p = spec.kind, spec.params
    if k == "bernoulli":
        return float(expit(math.log(p[0]) - math.log1p(-p[0]) + lam))
    if k == "gaussian":
        return p[0] + lam * p[1] ** 2
    if k == "exponential":
        if lam >= p[0]:
            raise DomainError(f"pressure of exponential({p[0]}) is infinite at lambda={lam}")
        return 1.0 / (p[0] - lam)
    if k == "poisson":
        try:
            return p[0] * math.exp(lam)
        except OverflowError:
            raise DomainError(f"pressure of poisson({p[0]}) overflows at lambda={lam}") from None
    v, lw = spec.log_atoms()
    e = np.exp(lw + lam * v - (lw + lam * v).max())
    return float(np.dot(e, v) / e.sum())


def domain_sup(spec: DistributionSpec) -> float:
    """Right end of {lam : p(lam) < inf}; the end itself is excluded."""
    if spec.kind == "exponential":
        return spec.params[0]
    return POS_INF


def _log_density(spec: DistributionSpec, x: float) -> float:
    mu_or_theta = spec.params[0]
    if spec.kind == "gaussian":
        s = spec.params[1]
        return -0.5 * ((x - mu_or_theta) / s) ** 2 - math.log(s * math.sqrt(2 * math.pi))
    if x < 0:
        return NEG_INF
    return math.log(mu_or_theta) - mu_or_theta * x


def truncated_pressure(spec: DistributionSpec, lam: float, K: float) -> ExtendedReal:
    """log E(exp(lam X_1) 1{|X_1| <= K}); ``-inf`` if the window has no mass."""
    if not K > 0:
        raise ValueError("K must be positive")
    k, p = spec.kind, spec.params
    if spec.is_finite:
        v, lw = spec.log_atoms()
        keep = np.abs(v) <= K
        if not keep.any():
            return NEG_INF
        return float(logsumexp(lw[keep] + lam * v[keep]))
    if k == "poisson":
        ks = np.arange(0, math.floor(K) + 1, dtype=float)
        th = p[0]
        return float(logsumexp(-th + ks * (math.log(th) + lam) - np.vectorize(math.lgamma)(ks + 1)))

    # continuous kinds: integrate exp(f - fmax) with f(x) = lam x + log density,
    # splitting at the maximizer of f on the window
    lo, hi = (-K, K) if k == "gaussian" else (0.0, K)
    if k == "gaussian":
        mode = min(max(p[0] + lam * p[1] ** 2, lo), hi)
    else:
        mode = hi if lam > p[0] else lo
    fmax = lam * mode + _log_density(spec, mode)

    def integrand(x):
        return math.exp(lam * x + _log_density(spec, x) - fmax)

    total = 0.0
    for a, b in ((lo, mode), (mode, hi)):
        if b > a:
            val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
            total += val
    if total <= 0:
        return NEG_INF
    return fmax + math.log(total)
