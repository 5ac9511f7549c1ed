import numpy as np
import pytest
from numpy.testing import assert_allclose
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from gainloss.errors import DomainError, SizeError
from gainloss.estimators import (
    FirstPassageTime,
    GainLossAsymmetry,
    GenGammaDensity,
    LeverageEstimator,
    ReturnPermuter,
    WaveletHighPass,
)
from gainloss.fitters import GenGammaParams, gengamma_sample
from gainloss.fpt import fpt_samples_naive
from gainloss.models import EgarchParams, SimulationSpec, simulate_egarch
from gainloss.series import rebuild


@pytest.fixture(scope="module")
def egarch_path():
    r = simulate_egarch(EgarchParams(), SimulationSpec(length=60_000, seed=21))
    return r.values, rebuild(r).values


def test_params_round_trip():
    for est in (FirstPassageTime(rho=0.1), GenGammaDensity(max_wait=100), LeverageEstimator(max_lag=40),
                GainLossAsymmetry(method="histogram"), WaveletHighPass(k=4), ReturnPermuter(3)):
        twin = clone(est)
        assert twin.get_params() == est.get_params()
        assert twin is not est


def test_first_passage_matches_function(egarch_path):
    _, x = egarch_path
    est = FirstPassageTime(rho_sigmas=5).fit(x.reshape(-1, 1))
    assert est.rho_ == pytest.approx(5 * np.std(np.diff(x), ddof=1), rel=1e-12)
    ref = fpt_samples_naive(x[:3000], est.rho_)
    small = FirstPassageTime(rho=est.rho_).fit(x[:3000])
    assert np.array_equal(small.gain_.samples, ref.samples)
    gain, loss = est.distributions()
    assert gain.probabilities.sum() == pytest.approx(1.0)
    with pytest.raises(NotFittedError):
        FirstPassageTime().distributions()


def test_leverage_estimator(egarch_path):
    r, _ = egarch_path
    est = LeverageEstimator(max_lag=60, fit_lags=(1, 40)).fit(r)
    assert est.curve_.lags[-1] == 60
    assert 0.05 < est.amplitude_ < 0.25
    assert_allclose(est.predict([0]), [-est.amplitude_])
    with pytest.raises(SizeError):
        LeverageEstimator(max_lag=100).fit(r[:50])


def test_gengamma_density():
    g = GenGammaParams(2.0, 10.0, 1.5)
    x = gengamma_sample(g, 20_000, seed=4)
    est = GenGammaDensity().fit(x)
    assert est.mode_ == pytest.approx(10 * (2 - 1 / 1.5) ** (1 / 1.5), rel=0.05)
    assert est.score(x) == pytest.approx(np.mean(est.score_samples(x)))
    with pytest.raises(DomainError):
        est.score_samples([1.0, -2.0])


def test_asymmetry_estimator(egarch_path):
    _, x = egarch_path
    est = GainLossAsymmetry().fit(x)
    assert est.d_m_ == est.measure_.d_m
    assert est.d_m_ > 0


def test_transformers_in_pipeline(egarch_path):
    r, x = egarch_path
    perm = ReturnPermuter(random_state=5)
    out = perm.fit_transform(r)
    assert_allclose(np.sort(out), np.sort(r))
    hp = WaveletHighPass(k=6, levels=8)
    y = hp.fit_transform(x)
    assert y.shape == (len(x) - len(x) % 256,)
    assert hp.truncated_prefix_length_ == len(x) % 256
    pipe = make_pipeline(ReturnPermuter(1), WaveletHighPass(k=4, levels=6, domain="returns"))
    z = pipe.fit_transform(r)
    assert z[0] == 0.0
    with pytest.raises(ValueError):
        WaveletHighPass(domain="freq").fit(x)


def test_validation_rejects_bad_input():
    with pytest.raises(ValueError):
        FirstPassageTime().fit(np.array([0.0, np.nan, 1.0]))
    with pytest.raises(SizeError):
        FirstPassageTime().fit(np.zeros((10, 2)))
