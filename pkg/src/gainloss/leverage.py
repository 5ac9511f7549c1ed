"""Leverage-effect estimators.

All three curves share one lagged cross-moment,

    C(tau) = (1/n) * sum_t (r_t - rbar) * (v_{t+tau} - vbar),

between returns ``r`` and the squared demeaned returns ``v = (r - rbar)**2``,
with full-sample means.  Dividing by ``n`` rather than by the number of pairs
keeps the correlation form inside [-1, 1] (Cauchy-Schwarz) at an ``O(tau/n)``
bias, and makes ``C(0)`` the third central moment, so the ``Var**1.5``
normalization returns the sample skewness exactly at ``tau = 0``.

The curves differ only in normalization:

* ``correlation``: ``C / (sd(r) * sd(v))``
* ``homogeneous-cov``: ``C / Var(r)**1.5``
* ``bouchaud``: ``C / Var(r)**2`` (not scale invariant)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, SizeError
from .series import ReturnSeries

KINDS = ("correlation", "homogeneous-cov", "bouchaud")
MIN_PAIRS = 30
DEFAULT_LAGS = range(0, 251)
DEFAULT_FIT_LAGS = range(1, 51)


@dataclass(frozen=True, eq=False)
class LeverageCurve:
    lags: np.ndarray
    values: np.ndarray
    kind: str
    n_pairs: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown leverage kind {self.kind!r}")
        lags = np.asarray(self.lags, dtype=np.int64)
        if lags.size > 1 and np.any(np.diff(lags) <= 0):
            raise DomainError("lags must be strictly increasing")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def restrict(self, lags) -> "LeverageCurve":
        """Sub-curve on the requested lags (which must be present)."""
        want = np.asarray(list(lags), dtype=np.int64)
        idx = np.searchsorted(self.lags, want)
        ok = (idx < self.lags.size) & (self.lags[np.minimum(idx, self.lags.size - 1)] == want)
        if not np.all(ok):
            raise SizeError("requested lags are not all present on the curve")
        n_pairs = None if self.n_pairs is None else self.n_pairs[idx]
        return LeverageCurve(want, self.values[idx], self.kind, n_pairs)


def _cross_moments(r: np.ndarray, lags: np.ndarray):
    n = r.size
    dev = r - r.mean()
    vol = dev * dev
    vdev = vol - vol.mean()
    out = np.empty(lags.size)
    pairs = np.empty(lags.size, dtype=np.int64)
    for i, tau in enumerate(lags):
        m = n - abs(int(tau))
        if m < MIN_PAIRS:
            raise SizeError(f"lag {tau} leaves {max(m, 0)} pairs, need at least {MIN_PAIRS}")
        if tau >= 0:
            out[i] = np.dot(dev[:m], vdev[tau:])
        else:
            out[i] = np.dot(dev[-tau:], vdev[:m])
        pairs[i] = m
    out /= n
    var_r = float(np.dot(dev, dev) / n)
    var_v = float(np.dot(vdev, vdev) / n)
    return out, pairs, var_r, var_v


def leverage_curve(ret, lags=DEFAULT_LAGS, kind: str = "correlation") -> LeverageCurve:
    if kind not in KINDS:
        raise DomainError(f"unknown leverage kind {kind!r}; expected one of {KINDS}")
    r = ret.values if isinstance(ret, ReturnSeries) else np.asarray(ret, dtype=float)
    lags = np.asarray(list(lags), dtype=np.int64)
    if lags.size == 0:
        raise SizeError("empty lag range")
    cov, pairs, var_r, var_v = _cross_moments(r, lags)
    if var_r == 0.0 or (kind == "correlation" and var_v == 0.0):
        raise DegenerateInputError("returns or squared returns have zero variance")
    if kind == "correlation":
        values = cov / np.sqrt(var_r * var_v)
    elif kind == "homogeneous-cov":
        values = cov / var_r**1.5
    else:
        values = cov / var_r**2
    return LeverageCurve(lags, values, kind, pairs)


def leverage_corr(ret, lags=DEFAULT_LAGS) -> LeverageCurve:
    """Correlation between today's return and the squared return ``tau`` days later."""
    return leverage_curve(ret, lags, "correlation")


def leverage_homogeneous(ret, lags=DEFAULT_LAGS) -> LeverageCurve:
    """Covariance normalized by ``Var**1.5``; equals the skewness at ``tau = 0``."""
    return leverage_curve(ret, lags, "homogeneous-cov")


def leverage_bouchaud(ret, lags=DEFAULT_LAGS) -> LeverageCurve:
    """Covariance normalized by ``Var**2``; rescaling returns by ``c`` divides it by ``c``."""
    return leverage_curve(ret, lags, "bouchaud")
