"""Estimators of P(mean of n draws >= x): exact, naive Monte Carlo, tilted IS.

Monte Carlo trials are split into chunks of ``CHUNK`` trials. Chunk ``i``
draws from ``PCG64(chunk_seed(seed, i))`` and the per-chunk partial sums are
reduced in chunk order, so results do not depend on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .distributions import (
    SEED_MASK,
    DistributionSpec,
    DomainError,
    draw,
    exact_sum_distribution,
    rng_for,
    tilt,
)
from .extreal import NEG_INF, ExtendedReal
from .pressure import pressure
from .rate import optimize_lambda

CHUNK = 4096
METHODS = ("exact", "naive", "tilted")


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & SEED_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & SEED_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & SEED_MASK
    return z ^ (z >> 31)


def chunk_seed(seed: int, index: int) -> int:
    return splitmix64((seed & SEED_MASK) ^ splitmix64(index))


def worker_count() -> int:
    env = os.environ.get("LDP_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"LDP_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK, trials - i * CHUNK)) for i in range(-(-trials // CHUNK))]


def _run_chunks(fn, trials: int) -> list:
    jobs = _chunks(trials)
    workers = min(worker_count(), len(jobs))
    if workers <= 1:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda j: fn(*j), jobs))


@dataclass(frozen=True)
class TailEstimate:
    n: int
    x: float
    log_prob: ExtendedReal
    prob: float
    stderr: float
    method: str
    trials: int
    seed: int
    lambda_used: float = 0.0


def _threshold(n: int, x: float) -> float:
    t = n * x
    return t - 1e-12 * max(1.0, abs(t))


def tail_exact(spec: DistributionSpec, n: int, x: float) -> TailEstimate:
    lp = exact_sum_distribution(spec, n).log_tail_mean(x)
    return TailEstimate(n, x, lp, math.exp(lp), 0.0, "exact", 0, 0)


def tail_naive(spec: DistributionSpec, n: int, x: float, trials: int, seed: int) -> TailEstimate:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cut = _threshold(n, x)

    def chunk(i, size):
        s = draw(spec, rng_for(chunk_seed(seed, i)), (size, n)).sum(axis=1)
        return int(np.count_nonzero(s >= cut))

    hits = sum(_run_chunks(chunk, trials))
    p = hits / trials
    lp = math.log(p) if hits else NEG_INF
    return TailEstimate(n, x, lp, p, math.sqrt(p * (1 - p) / trials), "naive", trials, seed)


def tail_tilted(spec: DistributionSpec, n: int, x: float, trials: int, seed: int) -> TailEstimate:
    """Importance sampling under the tilt lam* solving p'(lam*) = x.

    Each trial contributes 1{S_n >= n x} exp(-lam* S_n + n p(lam*)); the sums
    of weights and squared weights are kept in log space per chunk.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lam = optimize_lambda(spec, x)
    if lam == 0:
        est = tail_naive(spec, n, x, trials, seed)
        return TailEstimate(n, x, est.log_prob, est.prob, est.stderr, "tilted", trials, seed, 0.0)
    if not math.isfinite(lam):
        raise DomainError(f"no finite tilt for x={x}; the event is at or beyond the essential supremum")
    tilted = tilt(spec, lam)
    shift = n * pressure(spec, lam)
    cut = _threshold(n, x)

    def chunk(i, size):
        s = draw(tilted, rng_for(chunk_seed(seed, i)), (size, n)).sum(axis=1)
        lw = -lam * s[s >= cut] + shift
        if lw.size == 0:
            return NEG_INF, NEG_INF
        return float(logsumexp(lw)), float(logsumexp(2 * lw))

    parts = _run_chunks(chunk, trials)
    l1 = float(logsumexp([a for a, _ in parts]))
    l2 = float(logsumexp([b for _, b in parts]))
    if l1 == NEG_INF:
        return TailEstimate(n, x, NEG_INF, 0.0, 0.0, "tilted", trials, seed, lam)
    lp = min(0.0, l1 - math.log(trials))
    p = math.exp(lp)
    if trials > 1:
        # E[w^2] / E[w]^2 - 1, rescaled to the unbiased sample variance
        excess = max(0.0, math.expm1(l2 + math.log(trials) - 2 * l1))
        se = p * math.sqrt(excess * trials / (trials - 1) / trials)
    else:
        se = 0.0
    return TailEstimate(n, x, lp, p, se, "tilted", trials, seed, lam)


def tail(spec: DistributionSpec, n: int, x: float, method: str = "exact", trials: int = 100_000,
         seed: int = 0) -> TailEstimate:
    if method == "exact":
        return tail_exact(spec, n, x)
    if method == "naive":
        return tail_naive(spec, n, x, trials, seed)
    if method == "tilted":
        return tail_tilted(spec, n, x, trials, seed)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
