import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats as sps

from gainloss.errors import DegenerateInputError, DomainError, SizeError
from gainloss.leverage import (
    LeverageCurve,
    leverage_bouchaud,
    leverage_corr,
    leverage_curve,
    leverage_homogeneous,
)
from gainloss.series import ReturnSeries


def loop_oracle(r, tau, kind):
    n = len(r)
    m = sum(r) / n
    d = [x - m for x in r]
    v = [x * x for x in d]
    vm = sum(v) / n
    vd = [x - vm for x in v]
    if tau >= 0:
        c = sum(d[t] * vd[t + tau] for t in range(n - tau)) / n
    else:
        c = sum(d[t - tau] * vd[t] for t in range(n + tau)) / n
    var_r = sum(x * x for x in d) / n
    var_v = sum(x * x for x in vd) / n
    if kind == "correlation":
        return c / (var_r * var_v) ** 0.5
    if kind == "homogeneous-cov":
        return c / var_r**1.5
    return c / var_r**2


@pytest.mark.parametrize("kind", ["correlation", "homogeneous-cov", "bouchaud"])
def test_matches_loop_oracle(rng, kind):
    r = rng.standard_t(4, 300) * 0.01
    lags = [-5, 0, 1, 2, 17, 100]
    curve = leverage_curve(ReturnSeries(r), lags, kind)
    want = [loop_oracle(r.tolist(), t, kind) for t in lags]
    assert_allclose(curve.values, want, rtol=1e-10, atol=1e-14)
    assert curve.n_pairs.tolist() == [295, 300, 299, 298, 283, 200]


def test_homogeneous_zero_lag_is_skewness(rng):
    r = rng.gamma(2.0, size=5000)
    assert leverage_homogeneous(r, [0]).values[0] == pytest.approx(sps.skew(r))


@given(st.floats(0.01, 100.0), st.integers(0, 2**31))
def test_scale_behaviour(c, seed):
    r = np.random.default_rng(seed).standard_normal(400)
    lags = range(0, 20)
    assert_allclose(leverage_corr(c * r, lags).values, leverage_corr(r, lags).values, rtol=1e-7, atol=1e-12)
    assert_allclose(leverage_homogeneous(c * r, lags).values, leverage_homogeneous(r, lags).values,
                    rtol=1e-7, atol=1e-12)
    assert_allclose(c * leverage_bouchaud(c * r, lags).values, leverage_bouchaud(r, lags).values,
                    rtol=1e-7, atol=1e-12)


def test_sign_flip_negates(rng):
    r = rng.standard_normal(500)
    assert_allclose(leverage_corr(-r, range(10)).values, -leverage_corr(r, range(10)).values, atol=1e-15)


def test_iid_curve_is_small(rng):
    r = rng.standard_normal(200_000)
    vals = leverage_corr(r, range(1, 51)).values
    assert np.max(np.abs(vals)) < 5 / np.sqrt(200_000) * 2


def test_planted_leverage():
    # v_{t+1} rises after negative r_t, so L(1) < 0 and L(tau > 1) ~ 0
    rng = np.random.default_rng(0)
    z = rng.standard_normal(100_000)
    r = np.empty_like(z)
    r[0] = z[0]
    r[1:] = z[1:] * np.where(z[:-1] < 0, 2.0, 1.0)
    vals = leverage_corr(r, [1, 2, 3]).values
    assert vals[0] < -0.1
    assert abs(vals[1]) < 0.02 and abs(vals[2]) < 0.02


def test_errors():
    with pytest.raises(DomainError):
        leverage_curve(np.ones(100), [0], "nope")
    with pytest.raises(SizeError):
        leverage_corr(np.arange(40.0), [20])
    with pytest.raises(DegenerateInputError):
        leverage_corr(np.ones(100), [0])
    with pytest.raises(DomainError):
        LeverageCurve([0, 0], [1.0, 2.0], "correlation")


def test_restrict():
    c = leverage_corr(np.random.default_rng(1).standard_normal(300), range(0, 10))
    sub = c.restrict([2, 5])
    assert sub.lags.tolist() == [2, 5]
    assert sub.values.tolist() == [c.values[2], c.values[5]]
    with pytest.raises(SizeError):
        c.restrict([50])
