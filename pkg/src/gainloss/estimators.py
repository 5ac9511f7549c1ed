"""scikit-learn style wrappers around the functional core.

Each estimator stores only its hyper-parameters in ``__init__`` and sets
trailing-underscore attributes in ``fit``, so ``get_params``/``set_params``,
``clone`` and pipelines behave as usual.  ``X`` is always a single series
(1-D array or a one-column 2-D array).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive_waits, check_series
from .fitters import asymmetry, fit_expdecay, fit_gengamma, gengamma_logpdf, gengamma_mode
from .fpt import empirical_distribution, fpt_samples_fast
from .leverage import leverage_curve
from .series import LogPriceSeries, ReturnSeries, permute_returns
from .wavelet import WaveletSpec, high_pass_filtration, high_pass_returns


class FirstPassageTime(BaseEstimator):
    """First passage times of a log-price path at ``+rho`` and ``-rho``.

    Parameters
    ----------
    rho : float, optional
        Absolute level.  When omitted, ``rho_sigmas`` times the sample standard
        deviation of the path's returns is used.
    rho_sigmas : float
        Level in units of the daily standard deviation.
    """

    def __init__(self, rho=None, rho_sigmas=5.0):
        self.rho = rho
        self.rho_sigmas = rho_sigmas

    def fit(self, X, y=None):
        x = check_series(X)
        self.sigma_ = float(np.std(np.diff(x), ddof=1))
        self.rho_ = float(self.rho) if self.rho is not None else self.rho_sigmas * self.sigma_
        self.gain_ = fpt_samples_fast(LogPriceSeries(x), abs(self.rho_))
        self.loss_ = fpt_samples_fast(LogPriceSeries(x), -abs(self.rho_))
        return self

    def distributions(self):
        check_is_fitted(self, "gain_")
        return empirical_distribution(self.gain_), empirical_distribution(self.loss_)


class GenGammaDensity(DensityMixin, BaseEstimator):
    """Generalized gamma density fitted by maximum likelihood."""

    def __init__(self, max_wait=None):
        self.max_wait = max_wait

    def fit(self, X, y=None):
        t = check_positive_waits(X)
        self.params_ = fit_gengamma(t, max_wait=self.max_wait)
        self.alpha_ = self.params_.alpha
        self.beta_ = self.params_.beta
        self.nu_ = self.params_.nu
        try:
            self.mode_ = gengamma_mode(self.params_)
        except ValueError:
            self.mode_ = float("nan")
        return self

    def score_samples(self, X):
        check_is_fitted(self, "params_")
        return gengamma_logpdf(self.params_, check_positive_waits(X))

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))


class LeverageEstimator(BaseEstimator):
    """Leverage curve of a return series and its exponential decay fit.

    After ``fit``: ``curve_``, ``fit_``, ``amplitude_`` (A) and
    ``decay_time_`` (T).
    """

    def __init__(self, kind="correlation", max_lag=250, fit_lags=(1, 50)):
        self.kind = kind
        self.max_lag = max_lag
        self.fit_lags = fit_lags

    def fit(self, X, y=None):
        r = check_series(X, min_length=self.max_lag + 30)
        self.curve_ = leverage_curve(ReturnSeries(r), range(0, self.max_lag + 1), self.kind)
        lo, hi = self.fit_lags
        self.fit_ = fit_expdecay(self.curve_, range(lo, hi + 1))
        self.amplitude_ = self.fit_.a
        self.decay_time_ = self.fit_.t_scale
        return self

    def predict(self, lags):
        check_is_fitted(self, "fit_")
        return self.fit_.predict(lags)


class GainLossAsymmetry(BaseEstimator):
    """``d_m``: most likely waiting time for gains minus that for losses.

    Fitted attributes: ``sigma_``, ``rho_``, ``gain_``, ``loss_``,
    ``measure_``, ``d_m_``.
    """

    def __init__(self, rho=None, rho_sigmas=5.0, method="fitted", max_wait=250):
        self.rho = rho
        self.rho_sigmas = rho_sigmas
        self.method = method
        self.max_wait = max_wait

    def fit(self, X, y=None):
        fpt = FirstPassageTime(rho=self.rho, rho_sigmas=self.rho_sigmas).fit(X)
        self.sigma_, self.rho_ = fpt.sigma_, fpt.rho_
        self.gain_, self.loss_ = fpt.gain_, fpt.loss_
        self.measure_ = asymmetry(self.gain_, self.loss_, self.method, self.max_wait)
        self.d_m_ = self.measure_.d_m
        return self


class WaveletHighPass(TransformerMixin, BaseEstimator):
    """Transformer producing the filtration ``R_k`` of a log-price path.

    ``domain="price"`` transforms the path itself; ``domain="returns"``
    filters the increments and cumulates them.
    """

    def __init__(self, k=8, family="d4", levels=10, domain="price"):
        self.k = k
        self.family = family
        self.levels = levels
        self.domain = domain

    def fit(self, X, y=None):
        self.spec_ = WaveletSpec(self.family, self.levels)
        if self.domain not in ("price", "returns"):
            raise ValueError(f"domain must be 'price' or 'returns', got {self.domain!r}")
        check_series(X, min_length=self.spec_.block)
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        x = check_series(X, min_length=self.spec_.block)
        if self.domain == "price":
            filt = high_pass_filtration(x, self.k, self.spec_)
        else:
            filt = high_pass_returns(ReturnSeries(np.diff(x)), self.k, self.spec_)
        self.truncated_prefix_length_ = filt.truncated_prefix_length
        return np.asarray(filt.series.values)


class ReturnPermuter(TransformerMixin, BaseEstimator):
    """Randomly permutes a return series; stateless apart from the seed."""

    def __init__(self, random_state=0):
        self.random_state = random_state

    def fit(self, X, y=None):
        check_series(X, min_length=1)
        return self

    def transform(self, X):
        r = check_series(X, min_length=1)
        return np.asarray(permute_returns(ReturnSeries(r), self.random_state).values)
