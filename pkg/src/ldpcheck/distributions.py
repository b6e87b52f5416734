"""Law of X_1: parameters, sampling, exponential tilting and exact sum laws."""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.special import expit, logsumexp

from .extreal import NEG_INF, POS_INF, ExtendedReal

KINDS = ("bernoulli", "gaussian", "exponential", "poisson", "finite_discrete")
FINITE_KINDS = ("bernoulli", "finite_discrete")

MAX_ATOMS = 10**6
MERGE_TOL = 1e-12
_MAX_CANDIDATES = 10**8
SEED_MASK = (1 << 64) - 1


class SpecError(ValueError):
    """Malformed distribution spec string or invalid parameters."""


class UnsupportedKindError(ValueError):
    """Operation needs a finite-support law."""


class DomainError(ValueError):
    """Tilt parameter outside the domain where the MGF is finite."""


class SizeError(ValueError):
    """Exact sum distribution would exceed the atom cap."""


@dataclass(frozen=True)
class DistributionSpec:
    """Law of X_1.

    Parametric kinds keep their parameters in ``params``; ``finite_discrete``
    keeps sorted ``values`` and normalized ``weights``. Empirical samples are
    reduced to ``finite_discrete`` by :meth:`empirical`.
    """

    kind: str
    params: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        k, p = self.kind, self.params
        if k not in KINDS:
            raise SpecError(f"unknown kind {k!r}")
        nparams = {"bernoulli": 1, "gaussian": 2, "exponential": 1, "poisson": 1, "finite_discrete": 0}[k]
        if len(p) != nparams:
            raise SpecError(f"{k} takes {nparams} parameter(s), got {len(p)}")
        if any(not math.isfinite(v) for v in p):
            raise SpecError(f"{k} parameters must be finite, got {p}")
        if k == "bernoulli" and not 0 < p[0] < 1:
            raise SpecError(f"bernoulli needs 0 < p < 1, got {p[0]}")
        if k == "gaussian" and not p[1] > 0:
            raise SpecError(f"gaussian needs sigma > 0, got {p[1]}")
        if k in ("exponential", "poisson") and not p[0] > 0:
            raise SpecError(f"{k} needs a positive parameter, got {p[0]}")
        if k == "finite_discrete":
            if len(self.values) == 0 or len(self.values) != len(self.weights):
                raise SpecError("finite_discrete needs matching non-empty values and weights")
            if any(b <= a for a, b in zip(self.values, self.values[1:])):
                raise SpecError("finite_discrete values must be strictly increasing")
            if any(not w > 0 for w in self.weights):
                raise SpecError("finite_discrete weights must be positive")
            if abs(math.fsum(self.weights) - 1.0) > 1e-12:
                raise SpecError("finite_discrete weights must sum to 1")

    # constructors

    @classmethod
    def bernoulli(cls, p: float) -> DistributionSpec:
        return cls("bernoulli", (float(p),))

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> DistributionSpec:
        return cls("gaussian", (float(mu), float(sigma)))

    @classmethod
    def exponential(cls, theta: float) -> DistributionSpec:
        """Rate ``theta``; mean ``1/theta``."""
        return cls("exponential", (float(theta),))

    @classmethod
    def poisson(cls, theta: float) -> DistributionSpec:
        return cls("poisson", (float(theta),))

    @classmethod
    def discrete(cls, values: Sequence[float], weights: Sequence[float]) -> DistributionSpec:
        """Sorts atoms, sums weights of repeated values and normalizes."""
        v = np.asarray(values, dtype=float)
        w = np.asarray(weights, dtype=float)
        if v.ndim != 1 or v.shape != w.shape or v.size == 0:
            raise SpecError("values and weights must be non-empty 1-d sequences of equal length")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise SpecError("values must be finite and weights positive")
        uniq, inv = np.unique(v, return_inverse=True)
        agg = np.zeros(uniq.size)
        np.add.at(agg, inv, w)
        agg = agg / math.fsum(agg)
        return cls("finite_discrete", values=tuple(uniq.tolist()), weights=tuple(agg.tolist()))

    @classmethod
    def empirical(cls, samples: Sequence[float]) -> DistributionSpec:
        samples = np.asarray(samples, dtype=float)
        if samples.size == 0:
            raise SpecError("empirical law needs at least one sample")
        return cls.discrete(samples, np.ones(samples.size))

    # capabilities

    @property
    def is_finite(self) -> bool:
        return self.kind in FINITE_KINDS

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Support points and probabilities of a finite-support law."""
        if self.kind == "bernoulli":
            p = self.params[0]
            return np.array([0.0, 1.0]), np.array([1.0 - p, p])
        if self.kind == "finite_discrete":
            return np.array(self.values), np.array(self.weights)
        raise UnsupportedKindError(f"{self.kind} does not have finite support")

    def log_atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Support points and log-probabilities; cached, do not mutate."""
        return self._log_atoms

    @cached_property
    def _log_atoms(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "bernoulli":
            p = self.params[0]
            return np.array([0.0, 1.0]), np.array([math.log1p(-p), math.log(p)])
        v, w = self.atoms()
        return v, np.log(w)

    def __str__(self) -> str:
        if self.kind == "finite_discrete":
            return "discrete:" + ",".join(f"{v!r}:{w!r}" for v, w in zip(self.values, self.weights))
        return f"{self.kind}:" + ",".join(repr(p) for p in self.params)


# spec string grammar

_NUM = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _number(text: str, pos: int, source: str) -> float:
    tok = text.strip()
    if not _NUM.match(tok):
        raise SpecError(f"bad number {text!r} at position {pos} in {source!r}")
    return float(tok)


def _split(text: str, sep: str, offset: int) -> list[tuple[str, int]]:
    out, start = [], 0
    for part in text.split(sep):
        out.append((part, offset + start))
        start += len(part) + 1
    return out


def read_samples_csv(path: str) -> list[float]:
    """One-column CSV of samples; a non-numeric first row is taken as a header."""
    out = []
    with open(path, newline="") as f:
        for i, row in enumerate(csv.reader(f)):
            if not row or not row[0].strip():
                continue
            try:
                out.append(float(row[0]))
            except ValueError:
                if i == 0:
                    continue
                raise SpecError(f"bad sample {row[0]!r} on line {i + 1} of {path}") from None
    return out


def parse_spec(source: str) -> DistributionSpec:
    """Parse ``bernoulli:P``, ``gaussian:MU,SIGMA``, ``exponential:THETA``,
    ``poisson:THETA``, ``discrete:V1:W1,V2:W2,...`` or ``empirical:@PATH``.

    Errors name the offending token and its character position.
    """
    kind, sep, rest = source.partition(":")
    if not sep:
        raise SpecError(f"missing ':' after kind {kind!r} at position 0 in {source!r}")
    off = len(kind) + 1
    nparams = {"bernoulli": 1, "gaussian": 2, "exponential": 1, "poisson": 1}
    if kind in nparams:
        toks = _split(rest, ",", off)
        if len(toks) != nparams[kind]:
            raise SpecError(
                f"{kind} takes {nparams[kind]} parameter(s), got {len(toks)} in {source!r} at position {off}"
            )
        return DistributionSpec(kind, tuple(_number(t, p, source) for t, p in toks))
    if kind == "discrete":
        values, weights = [], []
        for tok, pos in _split(rest, ",", off):
            # split at the last colon so a negative value keeps its sign
            v, colon, w = tok.rpartition(":")
            if not colon:
                raise SpecError(f"expected VALUE:WEIGHT, got {tok!r} at position {pos} in {source!r}")
            values.append(_number(v, pos, source))
            weights.append(_number(w, pos + len(v) + 1, source))
        return DistributionSpec.discrete(values, weights)
    if kind == "empirical":
        if not rest.startswith("@") or len(rest) < 2:
            raise SpecError(f"expected @PATH, got {rest!r} at position {off} in {source!r}")
        try:
            samples = read_samples_csv(rest[1:])
        except OSError as e:
            raise SpecError(f"cannot read {rest[1:]!r} at position {off + 1}: {e.strerror}") from None
        return DistributionSpec.empirical(samples)
    raise SpecError(f"unknown kind {kind!r} at position 0 in {source!r}")


# moments and support

def mean(spec: DistributionSpec) -> float:
    k, p = spec.kind, spec.params
    if k == "bernoulli":
        return p[0]
    if k == "gaussian":
        return p[0]
    if k == "exponential":
        return 1.0 / p[0]
    if k == "poisson":
        return p[0]
    v, w = spec.atoms()
    return float(math.fsum(v * w))


def variance(spec: DistributionSpec) -> float:
    k, p = spec.kind, spec.params
    if k == "bernoulli":
        return p[0] * (1 - p[0])
    if k == "gaussian":
        return p[1] ** 2
    if k == "exponential":
        return 1.0 / p[0] ** 2
    if k == "poisson":
        return p[0]
    v, w = spec.atoms()
    m = mean(spec)
    return float(math.fsum(w * (v - m) ** 2))


def essential_sup(spec: DistributionSpec) -> ExtendedReal:
    if spec.is_finite:
        return float(spec.atoms()[0][-1])
    return POS_INF


def essential_inf(spec: DistributionSpec) -> ExtendedReal:
    if spec.is_finite:
        return float(spec.atoms()[0][0])
    if spec.kind in ("exponential", "poisson"):
        return 0.0
    return NEG_INF


def atom_mass(spec: DistributionSpec, x: float) -> float:
    """P(X_1 = x); zero for continuous kinds."""
    if spec.is_finite:
        v, w = spec.atoms()
        hit = np.abs(v - x) <= MERGE_TOL
        return float(w[hit].sum())
    if spec.kind == "poisson" and x >= 0 and float(x).is_integer():
        th = spec.params[0]
        return math.exp(-th + x * math.log(th) - math.lgamma(x + 1))
    return 0.0


# sampling

def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & SEED_MASK))


def draw(spec: DistributionSpec, rng: np.random.Generator, size) -> np.ndarray:
    k, p = spec.kind, spec.params
    if k == "bernoulli":
        return (rng.random(size) < p[0]).astype(float)
    if k == "gaussian":
        return rng.normal(p[0], p[1], size)
    if k == "exponential":
        return rng.exponential(1.0 / p[0], size)
    if k == "poisson":
        return rng.poisson(p[0], size).astype(float)
    v, w = spec.atoms()
    return v[rng.choice(v.size, size=size, p=w)]


def sample(spec: DistributionSpec, seed: int, count: int) -> np.ndarray:
    """``count`` i.i.d. draws, bitwise reproducible for a given ``seed``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return draw(spec, rng_for(seed), count)


def tilt(spec: DistributionSpec, lam: float) -> DistributionSpec:
    """Exponentially tilted law dP_lam ~ exp(lam * x) dP."""
    k, p = spec.kind, spec.params
    if lam == 0:
        return spec
    if k == "bernoulli":
        q = float(expit(math.log(p[0]) - math.log1p(-p[0]) + lam))
        if not 0 < q < 1:
            raise DomainError(f"tilt {lam} degenerates bernoulli({p[0]})")
        return DistributionSpec.bernoulli(q)
    if k == "gaussian":
        return DistributionSpec.gaussian(p[0] + lam * p[1] ** 2, p[1])
    if k == "exponential":
        if lam >= p[0]:
            raise DomainError(f"exponential({p[0]}) has infinite pressure at lambda={lam}")
        return DistributionSpec.exponential(p[0] - lam)
    if k == "poisson":
        th = p[0] * math.exp(lam)
        if not math.isfinite(th):
            raise DomainError(f"poisson({p[0]}) has infinite pressure at lambda={lam}")
        return DistributionSpec.poisson(th)
    v, lw = spec.log_atoms()
    z = lw + lam * v
    w = np.exp(z - logsumexp(z))
    keep = w > 0
    return DistributionSpec.discrete(v[keep], w[keep])


def tilted_sample(spec: DistributionSpec, lam: float, seed: int, count: int) -> np.ndarray:
    return sample(tilt(spec, lam), seed, count)


# exact laws of S_n

@dataclass(frozen=True)
class SumDistribution:
    """Exact law of S_n = X_1 + ... + X_n on sorted atoms, in log space."""

    n: int
    atoms: np.ndarray
    log_weights: np.ndarray

    def log_tail(self, threshold: float) -> ExtendedReal:
        """log P(S_n >= threshold), ties included."""
        # absorbs float drift in n * x so that intended ties stay ties
        cut = threshold - 1e-12 * max(1.0, abs(threshold))
        i = int(np.searchsorted(self.atoms, cut, side="left"))
        if i >= self.atoms.size:
            return NEG_INF
        return float(min(0.0, logsumexp(self.log_weights[i:])))

    def log_tail_mean(self, x: float) -> ExtendedReal:
        """log P(mean of n draws >= x)."""
        return self.log_tail(self.n * x)


def _merge(atoms: np.ndarray, logw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(atoms, kind="stable")
    a, lw = atoms[order], logw[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(a) > MERGE_TOL) + 1))
    gmax = np.maximum.reduceat(lw, starts)
    sizes = np.diff(np.append(starts, a.size))
    tot = np.add.reduceat(np.exp(lw - np.repeat(gmax, sizes)), starts)
    return a[starts], gmax + np.log(tot)


def iter_sum_distributions(spec: DistributionSpec, ns: Iterable[int]) -> Iterator[SumDistribution]:
    """Yield the exact law of S_n for each n in increasing ``ns``, sharing work."""
    if not spec.is_finite:
        raise UnsupportedKindError(f"exact sums need finite support, got {spec.kind}")
    v, lw1 = spec.log_atoms()
    atoms, logw = np.array([0.0]), np.array([0.0])
    cur = 0
    for n in ns:
        if n < 1 or n < cur:
            raise ValueError("ns must be positive and non-decreasing")
        while cur < n:
            if atoms.size * v.size > _MAX_CANDIDATES:
                raise SizeError(f"convolution at n={cur + 1} would exceed the atom cap")
            atoms, logw = _merge((atoms[:, None] + v[None, :]).ravel(), (logw[:, None] + lw1[None, :]).ravel())
            if atoms.size > MAX_ATOMS:
                raise SizeError(f"S_{cur + 1} has {atoms.size} atoms, cap is {MAX_ATOMS}")
            cur += 1
        yield SumDistribution(n, atoms.copy(), logw.copy())


def exact_sum_distribution(spec: DistributionSpec, n: int) -> SumDistribution:
    return next(iter_sum_distributions(spec, [n]))
