import math

import numpy as np
import pytest
from scipy.stats import norm

from conftest import ASYM, BERN, GAUSS, POIS, binomial_tail
from ldpcheck.distributions import DomainError, UnsupportedKindError, draw, rng_for, tilt
from ldpcheck.pressure import pressure
from ldpcheck.rate import optimize_lambda
from ldpcheck.tail import CHUNK, chunk_seed, splitmix64, tail, tail_exact, tail_naive, tail_tilted


def test_splitmix_reference_values():
    # first outputs of the reference splitmix64 generator started from state 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4
    assert chunk_seed(1, 0) != chunk_seed(1, 1) != chunk_seed(2, 0)


class TestExact:
    def test_examples(self):
        assert tail_exact(BERN, 2, 0.75).prob == pytest.approx(0.25, rel=1e-15)
        assert tail_exact(BERN, 2, 0.5).prob == pytest.approx(0.75, rel=1e-15)
        assert tail_exact(BERN, 3, 0.0).prob == 1.0
        assert tail_exact(BERN, 10, 0.7).prob == pytest.approx(0.171875, rel=1e-13)

    def test_invariants(self):
        e = tail_exact(BERN, 4, 2.0)
        assert e.log_prob == -math.inf and e.prob == 0.0 and e.stderr == 0.0
        e = tail_exact(ASYM, 5, 1.3)
        assert e.prob == pytest.approx(math.exp(e.log_prob)) and e.method == "exact"

    @pytest.mark.parametrize("n", [1, 7, 30, 64])
    def test_binomial(self, n):
        for k in range(0, n + 1, max(1, n // 6)):
            assert tail_exact(BERN, n, k / n).prob == pytest.approx(binomial_tail(n, k), rel=1e-11)

    def test_continuous(self):
        with pytest.raises(UnsupportedKindError):
            tail_exact(GAUSS, 3, 0.1)


class TestNaive:
    def test_sure_event(self):
        e = tail_naive(BERN, 5, -1e10, 1000, 0)
        assert e.prob == 1.0 and e.stderr == 0.0 and e.log_prob == 0.0

    def test_single_trial(self):
        for seed in range(5):
            assert tail_naive(BERN, 3, 0.5, 1, seed).prob in (0.0, 1.0)

    def test_against_exact(self):
        e = tail_naive(BERN, 10, 0.7, 100_000, 1)
        assert abs(e.prob - 0.171875) <= 4 * e.stderr
        assert e.stderr == pytest.approx(math.sqrt(e.prob * (1 - e.prob) / 1e5))

    def test_zero_hits(self):
        e = tail_naive(BERN, 60, 0.95, 2000, 3)
        assert e.prob == 0.0 and e.log_prob == -math.inf

    def test_bad_trials(self):
        with pytest.raises(ValueError):
            tail_naive(BERN, 3, 0.5, 0, 0)


class TestTilted:
    def test_bernoulli(self):
        e = tail_tilted(BERN, 50, 0.8, 100_000, 0)
        ex = tail_exact(BERN, 50, 0.8).prob
        assert abs(e.prob - ex) <= 4 * e.stderr
        assert e.stderr / e.prob < 0.05
        assert e.lambda_used == pytest.approx(math.log(4), abs=1e-9)

    def test_gaussian(self):
        e = tail_tilted(GAUSS, 100, 0.5, 100_000, 1)
        assert abs(e.prob - norm.sf(5.0)) <= 4 * e.stderr
        assert norm.sf(5.0) == pytest.approx(2.8665e-7, rel=1e-4)

    def test_poisson(self):
        # S_n ~ Poisson(n theta)
        from scipy.stats import poisson
        e = tail_tilted(POIS, 30, 1.6, 50_000, 4)
        want = poisson.sf(48 - 1, 30)
        assert abs(e.prob - want) <= 4 * e.stderr

    def test_zero_tilt_delegates(self):
        e = tail_tilted(BERN, 5, 0.3, 5000, 9)
        n = tail_naive(BERN, 5, 0.3, 5000, 9)
        assert e.method == "tilted" and e.lambda_used == 0.0
        assert (e.prob, e.stderr) == (n.prob, n.stderr)

    def test_no_finite_tilt(self):
        with pytest.raises(DomainError):
            tail_tilted(BERN, 5, 1.0, 100, 0)

    def test_log_space_accumulation(self):
        # recompute the estimator from the same streams in plain probability space
        n, x, trials, seed = 12, 0.75, 3 * CHUNK + 17, 5
        lam = optimize_lambda(BERN, x)
        t = tilt(BERN, lam)
        terms = []
        for i in range(-(-trials // CHUNK)):
            size = min(CHUNK, trials - i * CHUNK)
            s = draw(t, rng_for(chunk_seed(seed, i)), (size, n)).sum(axis=1)
            terms.append(np.where(s >= n * x - 1e-11, np.exp(-lam * s + n * pressure(BERN, lam)), 0.0))
        w = np.concatenate(terms)
        e = tail_tilted(BERN, n, x, trials, seed)
        assert e.prob == pytest.approx(w.mean(), rel=1e-12)
        assert e.stderr == pytest.approx(w.std(ddof=1) / math.sqrt(trials), rel=1e-9)

    def test_unbiased_over_seeds(self):
        ex = tail_exact(BERN, 20, 0.8).prob
        ests = [tail_tilted(BERN, 20, 0.8, 2000, 1000 + s) for s in range(50)]
        avg = np.mean([e.prob for e in ests])
        pooled = math.sqrt(sum(e.stderr ** 2 for e in ests)) / len(ests)
        assert abs(avg - ex) <= 5 * pooled

    def test_variance_reduction(self):
        t = tail_tilted(BERN, 50, 0.8, 100_000, 2)
        nv = tail_naive(BERN, 50, 0.8, 100_000, 2)
        assert t.stderr / t.prob < 0.05
        assert nv.prob == 0.0 or nv.stderr / nv.prob > t.stderr / t.prob


@pytest.mark.parametrize("method", ["naive", "tilted"])
def test_thread_count_independent(monkeypatch, method):
    out = []
    for threads in ("1", "4", "3"):
        monkeypatch.setenv("LDP_THREADS", threads)
        out.append(tail(ASYM, 15, 2.6, method, 5 * CHUNK + 100, 77))
    assert out[0] == out[1] == out[2]


def test_bad_env(monkeypatch):
    monkeypatch.setenv("LDP_THREADS", "0")
    with pytest.raises(ValueError):
        tail(BERN, 3, 0.5, "naive", 10, 0)


def test_unknown_method():
    with pytest.raises(ValueError):
        tail(BERN, 3, 0.5, "bogus")
