"""Worked examples and statistical invariants across the toolkit."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats as sps

from gainloss.fitters import (
    GenGammaParams,
    asymmetry,
    fit_expdecay,
    fit_gengamma,
    gengamma_mode,
    gengamma_pdf,
    gengamma_sample,
    linear_fit,
)
from gainloss.fpt import FptSamples, empirical_distribution, fpt_samples
from gainloss.leverage import LeverageCurve, leverage_bouchaud, leverage_corr, leverage_homogeneous
from gainloss.models import (
    EgarchParams,
    RetardedParams,
    SimulationSpec,
    egarch_path,
    egarch_unconditional_variance,
    simulate_egarch,
    simulate_iid_gaussian,
    simulate_retarded,
)
from gainloss.series import LogPriceSeries, ReturnSeries, permute_returns, rebuild, returns, stats, to_log
from gainloss.wavelet import WaveletSpec, high_pass_filtration

finite = st.floats(-1e3, 1e3, allow_nan=False)


# --------------------------------------------------------------------------
# series


def test_small_series_examples():
    r = returns(LogPriceSeries(np.array([0.0, 1.0, 3.0])))
    assert_allclose(r.values, [1.0, 2.0])
    assert r.origin == 0.0
    assert np.all(returns(LogPriceSeries(np.full(6, 2.5))).values == 0)
    assert_allclose(rebuild(ReturnSeries(np.zeros(4), origin=5.0)).values, 5.0)
    one = ReturnSeries(np.array([0.3]))
    assert_allclose(permute_returns(one, 7).values, [0.3])
    assert_allclose(stats(ReturnSeries(np.array([-1.0, 1.0]))).std, np.sqrt(2))


def test_std_of_many_normals(rng):
    assert abs(stats(ReturnSeries(rng.standard_normal(10**6))).std - 1) < 0.01


@given(st.lists(finite, min_size=2, max_size=40), st.integers(0, 2**32 - 1))
def test_stats_invariant_under_permutation(values, seed):
    a = ReturnSeries(np.array(values))
    b = permute_returns(a, seed)
    sa, sb = stats(a), stats(b)
    assert_allclose([sb.mean, sb.std], [sa.mean, sa.std], rtol=1e-9, atol=1e-9)
    assert_allclose(sb.skewness, sa.skewness, rtol=1e-6, atol=1e-6)


# --------------------------------------------------------------------------
# models


def test_collapsed_egarch_is_iid():
    p = EgarchParams(mu=0.0, a0=-8.0, a1a=0.0, a1b=0.0, b1=0.0)
    assert_allclose(egarch_unconditional_variance(p), np.exp(-8.0), rtol=1e-12)
    r = simulate_egarch(p, SimulationSpec(200_000, seed=3)).values
    sigma = np.exp(-4.0)
    se = sigma / np.sqrt(r.size)
    assert abs(r.mean() - (-sigma**2 / 2)) < 4 * se
    assert abs(r.std() / sigma - 1) < 0.01


def test_news_impact_slopes():
    p = EgarchParams(a1a=-0.15, a1b=0.20, b1=0.92)
    _, lv, z = egarch_path(p, SimulationSpec(200_000, seed=5))
    y, zp = lv[1:] - p.b1 * lv[:-1], z[:-1]
    up, down = zp > 0, zp < 0
    slope_up = sps.linregress(zp[up], y[up]).slope
    slope_down = sps.linregress(-zp[down], y[down]).slope
    assert slope_up == pytest.approx(p.a1b + p.a1a, rel=0.02)
    assert slope_down == pytest.approx(p.a1b - p.a1a, rel=0.02)


@pytest.mark.parametrize("c, alpha", [(0.0, 0.985), (1.0, 0.0)])
def test_retarded_without_memory_has_no_leverage(c, alpha):
    prices = simulate_retarded(RetardedParams(alpha=alpha, c=c), SimulationSpec(200_000, seed=2))
    curve = leverage_corr(returns(to_log(prices)), range(1, 21))
    assert np.all(np.abs(curve.values) < 4 / np.sqrt(200_000))


def test_iid_std_at_full_length():
    r = simulate_iid_gaussian(0.0, 0.013, SimulationSpec(10**6, seed=8))
    assert abs(stats(r).std / 0.013 - 1) < 0.005


def test_different_seeds_give_independent_paths():
    a = simulate_egarch(EgarchParams(), SimulationSpec(50_000, seed=1)).values
    b = simulate_egarch(EgarchParams(), SimulationSpec(50_000, seed=2)).values
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / np.sqrt(a.size)


def test_retarded_leverage_decays_like_memory_kernel():
    # single paths are heavy-tailed, so average over seeds and compare within 3 SE
    alpha, lags = 0.9, np.arange(1, 6)
    curves = []
    for seed in range(6):
        prices = simulate_retarded(RetardedParams(sigma=0.01, alpha=alpha, c=1.0), SimulationSpec(10**6, seed=seed))
        curves.append(leverage_bouchaud(returns(to_log(prices)), lags).values)
    curves = np.array(curves)
    se = curves.std(axis=0, ddof=1) / np.sqrt(len(curves))
    assert np.all(np.abs(curves.mean(axis=0) + 2 * alpha**lags) < 3 * se + 0.05)


# --------------------------------------------------------------------------
# first passage times


def test_fpt_examples():
    assert list(fpt_samples(np.array([0.0, 0.06]), 0.05).samples) == [1]
    assert list(fpt_samples(np.array([0.0, 0.02, 0.04, 0.06]), 0.05).samples) == [3]
    flat = fpt_samples(np.zeros(20), -0.05)
    assert flat.samples.size == 0 and flat.starts_scanned > 0


@given(st.floats(1e-3, 1.0), st.integers(1, 6), st.integers(10, 60))
def test_monotone_steps(d, k, n):
    x = d * np.arange(n)
    s = fpt_samples(x, k * d * (1 - 1e-12))
    assert s.samples.size > 0 and np.all(s.samples == k)


def test_distribution_examples():
    dist = empirical_distribution(FptSamples(0.1, np.array([1, 1, 2]), 3, 3))
    assert_allclose(dist.probabilities, [2 / 3, 1 / 3])
    single = empirical_distribution(FptSamples(0.1, np.array([4, 4, 4]), 3, 3))
    assert_allclose(single.probabilities, [1.0])


def test_geometric_waits_match_pmf():
    # up-steps of size 1 with probability p: the wait to +1 is geometric
    p, n = 0.3, 200_000
    rng = np.random.default_rng(11)
    x = np.concatenate([[0.0], np.cumsum(rng.random(n) < p).astype(float)])
    s = fpt_samples(x, 0.5)
    dist = empirical_distribution(s)
    m = s.samples.size
    for t, prob in zip(dist.support[:8], dist.probabilities[:8]):
        pmf = (1 - p) ** (t - 1) * p
        assert abs(prob - pmf) < 3 * np.sqrt(pmf * (1 - pmf) / m) + 1e-4


def test_hit_fraction_grows_as_level_shrinks(rng):
    x = np.cumsum(rng.standard_normal(20_000)) * 0.01
    fractions = [fpt_samples(x, rho).hit_fraction for rho in (0.5, 0.2, 0.05, 0.01, 0.001)]
    assert all(np.diff(fractions) >= 0)
    assert fractions[-1] > 0.99


# --------------------------------------------------------------------------
# leverage


def test_correlation_is_bounded(rng):
    r = rng.standard_t(3, 5000)
    assert np.all(np.abs(leverage_corr(ReturnSeries(r), range(1, 51)).values) <= 1)


def test_iid_leverage_vanishes():
    r = simulate_iid_gaussian(0.0, 0.01, SimulationSpec(10**6, seed=6))
    curve = leverage_corr(r, range(1, 51))
    assert np.all(np.abs(curve.values) < 0.01)
    se = 1 / np.sqrt(len(r))
    assert np.mean(np.abs(curve.values) < 3 * se) >= 0.95


def test_homogeneous_is_scale_free(rng):
    r = rng.standard_normal(5000) * 0.01
    a = leverage_homogeneous(ReturnSeries(r), range(1, 21)).values
    b = leverage_homogeneous(ReturnSeries(100 * r), range(1, 21)).values
    assert_allclose(a, b, rtol=1e-10, atol=1e-12)


def test_egarch_leverage_is_negative_and_rising():
    r = simulate_egarch(EgarchParams(a1a=-0.3), SimulationSpec(10**6, seed=9))
    curve = leverage_corr(r, range(1, 31))
    assert np.all(curve.values < 0)
    smooth = np.convolve(curve.values, np.ones(5) / 5, mode="valid")
    assert smooth[-1] > smooth[0]


def test_permuting_removes_leverage():
    r = simulate_egarch(EgarchParams(a1a=-0.3), SimulationSpec(300_000, seed=12))
    before = leverage_corr(r, range(1, 11)).values
    after = leverage_corr(permute_returns(r, 1), range(1, 11)).values
    assert before.mean() < -0.05
    assert np.all(np.abs(after) < 5 / np.sqrt(len(r)))


# --------------------------------------------------------------------------
# fitters


def test_special_cases_of_generalized_gamma():
    t = np.linspace(0.1, 30, 50)
    assert_allclose(gengamma_pdf(GenGammaParams(1.0, 4.0, 1.0), t), sps.expon.pdf(t, scale=4.0), rtol=1e-12)
    assert_allclose(gengamma_pdf(GenGammaParams(2.5, 3.0, 1.0), t), sps.gamma.pdf(t, 2.5, scale=3.0), rtol=1e-12)
    assert gengamma_mode(GenGammaParams(2.0, 10.0, 1.0)) == pytest.approx(10.0)


def test_exponential_samples_fit_as_exponential():
    t = np.random.default_rng(13).exponential(5.0, 20_000)
    fit = fit_gengamma(t)
    assert fit.alpha == pytest.approx(1.0, rel=0.05)
    assert fit.nu == pytest.approx(1.0, rel=0.05)


def test_refit_is_idempotent_and_improves_on_start():
    t = gengamma_sample(GenGammaParams(2.0, 5.0, 0.8), 5000, 21)
    start = GenGammaParams(1.0, 10.0, 1.0)
    fit = fit_gengamma(t, start=start)
    start_ll = np.sum(np.log(gengamma_pdf(start, t)))
    assert fit.loglik >= start_ll
    again = fit_gengamma(t, start=fit)
    assert again.loglik >= fit.loglik - 1e-9
    assert_allclose([again.alpha, again.log_beta, again.nu], [fit.alpha, fit.log_beta, fit.nu], rtol=1e-3)


def test_expdecay_under_small_noise():
    tau = np.arange(1, 51)
    truth = -0.2 * np.exp(-tau / 10.0)
    amps = []
    for seed in range(100):
        y = truth + np.random.default_rng(seed).normal(0, 0.005, tau.size)
        amps.append(fit_expdecay(LeverageCurve(tau, y, "correlation"), tau).a)
    assert np.all(np.abs(np.array(amps) - 0.2) <= 0.01)


def test_linear_fit_exact_and_noisy():
    xs = np.arange(10.0)
    exact = linear_fit(xs, 3 - 2 * xs)
    assert_allclose([exact.slope, exact.intercept, exact.r_squared], [-2, 3, 1], atol=1e-12)
    rng = np.random.default_rng(1)
    noisy = linear_fit(xs, 3 - 2 * xs + rng.normal(0, 0.1, xs.size))
    ref = sps.linregress(xs, 3 - 2 * xs + np.random.default_rng(1).normal(0, 0.1, xs.size))
    assert abs(noisy.slope + 2) < 3 * ref.stderr


def test_asymmetry_swap_and_shift():
    g = FptSamples(0.1, gengamma_sample(GenGammaParams(3.0, 4.0, 1.0), 4000, 1).round().clip(1).astype(int), 4000, 4000)
    l = FptSamples(-0.1, gengamma_sample(GenGammaParams(3.0, 2.0, 1.0), 4000, 2).round().clip(1).astype(int), 4000, 4000)
    ab = asymmetry(g, l, max_wait=250)
    ba = asymmetry(l, g, max_wait=250)
    assert ab.d_m == pytest.approx(-ba.d_m, abs=1e-9)
    assert ab.d_m > 0


# --------------------------------------------------------------------------
# wavelets


@pytest.mark.parametrize("family", ["haar", "d4"])
def test_alternating_sign_lives_in_finest_level(family):
    x = np.tile([1.0, -1.0], 512)
    r2 = high_pass_filtration(x, 2, WaveletSpec(family, 10)).series.values
    assert_allclose(r2, x, atol=1e-10)


@pytest.mark.parametrize("k", [4, 6])
def test_slow_sinusoid_is_removed(k):
    n = 2**12
    period = 2 ** (k + 2)
    x = np.sin(2 * np.pi * np.arange(n) / period)
    r = high_pass_filtration(x, k, WaveletSpec("d4", 10)).series.values
    assert r @ r < 0.05 * (x @ x)


@pytest.mark.parametrize("k", [3, 5, 8])
def test_white_noise_energy_fraction(k):
    x = np.random.default_rng(k).standard_normal(2**16)
    r = high_pass_filtration(x, k, WaveletSpec("d4", 10)).series.values
    assert (r @ r) / (x @ x) == pytest.approx(1 - 2.0 ** -(k - 1), abs=0.02)


def test_filtration_variance_grows_with_k(rng):
    x = np.cumsum(rng.standard_normal(2**14))
    spec = WaveletSpec("d4", 10)
    variances = [high_pass_filtration(x, k, spec).series.values.var() for k in range(2, 11)]
    assert all(np.diff(variances) > 0)
    for k in (2, 6, 10):
        assert abs(high_pass_filtration(x, k, spec).series.values.mean()) < 1e-9
