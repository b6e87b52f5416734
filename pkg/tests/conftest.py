import itertools
import math

import numpy as np
import pytest

from ldpcheck.distributions import DistributionSpec

BERN = DistributionSpec.bernoulli(0.5)
ASYM = DistributionSpec.discrete([-1.0, 2.0, 5.0], [0.5, 0.3, 0.2])
GAUSS = DistributionSpec.gaussian(0.0, 1.0)
EXPO = DistributionSpec.exponential(1.0)
POIS = DistributionSpec.poisson(1.0)

ALL_SPECS = [BERN, ASYM, GAUSS, EXPO, POIS, DistributionSpec.bernoulli(0.2), DistributionSpec.gaussian(1.5, 0.7),
             DistributionSpec.exponential(2.5), DistributionSpec.poisson(3.0)]
FINITE_SPECS = [BERN, ASYM, DistributionSpec.bernoulli(0.2),
                DistributionSpec.discrete([0.0, 0.5, 1.5, 4.0], [0.1, 0.4, 0.3, 0.2])]


def brute_force_tail(spec, n, x):
    """P(mean of n draws >= x) by enumerating every outcome."""
    v, w = spec.atoms()
    total = 0.0
    for idx in itertools.product(range(v.size), repeat=n):
        if sum(v[i] for i in idx) >= n * x - 1e-12 * max(1.0, abs(n * x)):
            total += math.prod(w[i] for i in idx)
    return total


def enumerate_tail(spec, n, x):
    """Vectorized enumeration over all atoms^n outcomes (fine up to ~1e6)."""
    v, w = spec.atoms()
    a = v.size
    idx = np.arange(a ** n)
    s = np.zeros(idx.size)
    lp = np.zeros(idx.size)
    for _ in range(n):
        d = idx % a
        s += v[d]
        lp += np.log(w[d])
        idx //= a
    cut = n * x - 1e-12 * max(1.0, abs(n * x))
    return float(np.exp(lp[s >= cut]).sum())


def binomial_tail(n, k, p=0.5):
    """P(Binomial(n, p) >= k) from exact integer coefficients."""
    return math.fsum(math.comb(n, j) * p ** j * (1 - p) ** (n - j) for j in range(max(k, 0), n + 1))


@pytest.fixture(autouse=True)
def _single_thread(monkeypatch):
    monkeypatch.setenv("LDP_THREADS", "1")
