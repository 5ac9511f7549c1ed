"""Curve and density fits: exponential leverage decay, generalized gamma
waiting-time densities, the gain/loss mode gap ``d_m`` and straight lines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammainc, gammaln

from .errors import DegenerateInputError, DomainError, FitError, SizeError
from .fpt import FptSamples, binned_density, empirical_distribution
from .leverage import DEFAULT_FIT_LAGS, LeverageCurve

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# --------------------------------------------------------------------------
# exponential decay of the leverage curve


@dataclass(frozen=True)
class ExpDecayFit:
    a: float
    t_scale: float
    residual: float
    iterations: int = 0

    def predict(self, lags) -> np.ndarray:
        lags = np.asarray(lags, dtype=float)
        return -self.a * np.exp(-lags / self.t_scale)


def _profile(tau, y, log_t):
    e = np.exp(-tau / math.exp(log_t))
    ee = float(e @ e)
    a = -float(y @ e) / ee if ee > 0 else 0.0
    r = y + a * e
    return float(r @ r), a


def fit_expdecay(
    curve: LeverageCurve,
    fit_lags=DEFAULT_FIT_LAGS,
    t_bounds: tuple[float, float] = (1.0, 1000.0),
    max_iter: int = 200,
    tol: float = 1e-12,
) -> ExpDecayFit:
    """Least-squares fit of ``-A exp(-tau/T)`` to a leverage curve.

    For each candidate ``T`` the amplitude has a closed form, so the search is
    one-dimensional: a coarse log-grid brackets the minimum over
    ``t_bounds``, golden-section search narrows it in ``log T``, and a short
    Gauss-Newton polish on ``(A, log T)`` takes the estimate to machine
    precision on noiseless data.  ``A > 0`` is the usual (negative)
    leverage; a reversed effect comes out with ``A < 0``.
    """
    sub = curve.restrict(fit_lags) if fit_lags is not None else curve
    tau = sub.lags.astype(float)
    y = sub.values.astype(float)
    if tau.size < 4:
        raise SizeError(f"exponential fit needs >= 4 lags, got {tau.size}")
    lo, hi = (math.log(b) for b in t_bounds)

    grid = np.linspace(lo, hi, 121)
    rss = np.array([_profile(tau, y, g)[0] for g in grid])
    k = int(np.argmin(rss))
    a_, b_ = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]

    c_ = b_ - GOLDEN * (b_ - a_)
    d_ = a_ + GOLDEN * (b_ - a_)
    fc, fd = _profile(tau, y, c_)[0], _profile(tau, y, d_)[0]
    it = 0
    while b_ - a_ > tol * max(1.0, abs(a_)):
        if it >= max_iter:
            raise FitError(
                "golden-section search did not converge",
                {"bracket": (math.exp(a_), math.exp(b_)), "iterations": it},
            )
        if fc < fd:
            b_, d_, fd = d_, c_, fc
            c_ = b_ - GOLDEN * (b_ - a_)
            fc = _profile(tau, y, c_)[0]
        else:
            a_, c_, fc = c_, d_, fd
            d_ = a_ + GOLDEN * (b_ - a_)
            fd = _profile(tau, y, d_)[0]
        it += 1
    log_t = 0.5 * (a_ + b_)
    best, amp = _profile(tau, y, log_t)

    # Gauss-Newton on r = y + A exp(-tau e^{-u}), u = log T
    for _ in range(20):
        t_ = math.exp(log_t)
        e = np.exp(-tau / t_)
        r = y + amp * e
        jac = np.column_stack((e, amp * e * tau / t_))
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        new_amp, new_log_t = amp + step[0], log_t + step[1]
        if not (lo <= new_log_t <= hi):
            break
        trial = y + new_amp * np.exp(-tau / math.exp(new_log_t))
        trial_rss = float(trial @ trial)
        if not trial_rss < best:
            break
        amp, log_t, best = new_amp, new_log_t, trial_rss
    return ExpDecayFit(
        a=float(amp),
        t_scale=float(math.exp(log_t)),
        residual=math.sqrt(best / tau.size),
        iterations=it,
    )


# --------------------------------------------------------------------------
# generalized gamma (Stacy form)


@dataclass(frozen=True)
class GenGammaParams:
    """Stacy generalized gamma ``f(t) = nu t^(alpha nu - 1) exp(-(t/beta)^nu) / (beta^(alpha nu) Gamma(alpha))``.

    ``log_beta`` is authoritative: near the log-normal limit (large alpha,
    small nu) ``beta`` itself can underflow.
    """

    alpha: float
    beta: float = float("nan")
    nu: float = 1.0
    loglik: float = float("nan")
    log_beta: float | None = None
    n_samples: int = 0
    max_wait: float | None = None

    def __post_init__(self):
        if self.log_beta is None:
            if not self.beta > 0:
                raise DomainError(f"beta must be > 0, got {self.beta}")
            object.__setattr__(self, "log_beta", math.log(self.beta))
        else:
            object.__setattr__(self, "beta", math.exp(self.log_beta))
        if not (self.alpha > 0 and self.nu > 0 and math.isfinite(self.log_beta)):
            raise DomainError(
                f"generalized gamma needs alpha, beta, nu > 0 (got {self.alpha}, {self.beta}, {self.nu})"
            )

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "log_beta": self.log_beta,
            "nu": self.nu,
        }


def gengamma_logpdf(params: GenGammaParams, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("generalized gamma density is defined for t > 0 only")
    log_w = params.nu * (np.log(t) - params.log_beta)
    return (
        math.log(params.nu) - np.log(t) + params.alpha * log_w - np.exp(log_w)
        - gammaln(params.alpha)
    )


def gengamma_pdf(params: GenGammaParams, t):
    """Density at ``t > 0``; scalar in, scalar out."""
    out = np.exp(gengamma_logpdf(params, t))
    return float(out) if np.ndim(out) == 0 else out


def gengamma_cdf(params: GenGammaParams, t):
    t = np.asarray(t, dtype=float)
    w = np.exp(params.nu * (np.log(np.maximum(t, 1e-300)) - params.log_beta))
    return gammainc(params.alpha, w)


def gengamma_mode(params: GenGammaParams) -> float:
    """Interior mode ``beta (alpha - 1/nu)**(1/nu)``; needs ``alpha nu > 1``."""
    if params.alpha * params.nu <= 1:
        raise DomainError(
            f"alpha*nu = {params.alpha * params.nu:.6g} <= 1: the density peaks at 0+"
        )
    return math.exp(params.log_beta + math.log(params.alpha - 1.0 / params.nu) / params.nu)


def gengamma_sample(params: GenGammaParams, size: int, seed) -> np.ndarray:
    """Draws via ``beta * G**(1/nu)`` with ``G ~ Gamma(alpha)``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_gamma(params.alpha, size)
    return np.exp(params.log_beta + np.log(g) / params.nu)


# The optimizer works in log-gamma coordinates (location mu, scale sigma,
# shape q): alpha = q**-2, nu = q / sigma, log beta = mu - log(alpha) / nu.
# They stay well conditioned as the fit approaches the log-normal limit
# (q -> 0), where alpha and beta run off to extremes.
_LOG_Q_BOUNDS = (math.log(1e-3), math.log(1e2))
_LOG_SIGMA_BOUNDS = (-12.0, 6.0)


def _to_stacy(theta):
    mu, log_s, log_q = theta
    s, q = math.exp(log_s), math.exp(log_q)
    alpha = q ** -2
    nu = q / s
    return alpha, mu + 2.0 * s * log_q / q, nu


def _from_stacy(alpha, log_beta, nu):
    q = alpha ** -0.5
    s = q / nu
    return np.array([log_beta + math.log(alpha) / nu, math.log(s), math.log(q)])


def _mean_loglik(alpha, log_beta, nu, log_t, weights, log_cap):
    log_w = nu * (log_t - log_beta)
    ll = math.log(nu) - log_t + alpha * log_w - np.exp(log_w) - gammaln(alpha)
    value = float(weights @ ll)
    if log_cap is not None:
        mass = gammainc(alpha, math.exp(min(nu * (log_cap - log_beta), 700.0)))
        if not mass > 0:
            return -math.inf
        value -= math.log(mass)
    return value


def _as_waits(samples) -> np.ndarray:
    if isinstance(samples, FptSamples):
        return samples.samples.astype(float)
    return np.asarray(samples, dtype=float).reshape(-1)


MIN_FIT_SAMPLES = 100


def fit_gengamma(
    samples,
    max_wait: float | None = None,
    start: GenGammaParams | None = None,
    maxiter: int = 500,
    rtol: float = 1e-8,
) -> GenGammaParams:
    """Maximum-likelihood generalized gamma fit to positive waiting times.

    Parameters
    ----------
    samples : FptSamples or array_like
        Waiting times (> 0).  Ties are collapsed to weighted unique values.
    max_wait : float, optional
        Fit only ``t <= max_wait`` with the right-truncated likelihood
        ``f(t) / F(max_wait)``.  The raw waiting times of a random walk have a
        ``t**-1.5`` tail that no Stacy density follows; truncation keeps the
        fit on the body of the distribution.
    start : GenGammaParams, optional
        Starting point; defaults to a method-of-moments gamma fit (``nu = 1``).
    maxiter, rtol
        Nelder-Mead budget per run (one restart is allowed) and relative
        tolerance on the objective.
    """
    t = _as_waits(samples)
    if np.any(~(t > 0)):
        raise DomainError("waiting times must be > 0")
    if max_wait is not None:
        t = t[t <= max_wait]
    if t.size < MIN_FIT_SAMPLES:
        raise SizeError(f"generalized gamma fit needs >= {MIN_FIT_SAMPLES} samples, got {t.size}")
    values, counts = np.unique(t, return_counts=True)
    if values.size < 2:
        raise DegenerateInputError("all waiting times are equal; no density to fit")
    weights = counts / counts.sum()
    log_t = np.log(values)
    log_cap = None if max_wait is None else math.log(max_wait)

    if start is None:
        mean = float(weights @ values)
        var = float(weights @ (values - mean) ** 2)
        a0 = mean * mean / var
        theta0 = _from_stacy(a0, math.log(var / mean), 1.0)
    else:
        theta0 = _from_stacy(start.alpha, start.log_beta, start.nu)
    bounds = [(None, None), _LOG_SIGMA_BOUNDS, _LOG_Q_BOUNDS]
    theta0[1] = np.clip(theta0[1], *_LOG_SIGMA_BOUNDS)
    theta0[2] = np.clip(theta0[2], *_LOG_Q_BOUNDS)

    def objective(theta):
        value = _mean_loglik(*_to_stacy(theta), log_t, weights, log_cap)
        return -value if math.isfinite(value) else 1e300

    f0 = objective(theta0)
    theta, f, nit = theta0, f0, 0
    for _ in range(2):
        res = minimize(
            objective, theta, method="Nelder-Mead", bounds=bounds,
            options={"maxiter": maxiter, "xatol": rtol, "fatol": rtol * max(1.0, abs(f))},
        )
        nit += res.nit
        if res.fun <= f:
            theta, f = res.x, float(res.fun)
        if res.success:
            break
    if not math.isfinite(f) or f >= 1e300 or f > f0:
        raise FitError(
            "generalized gamma fit did not improve on its starting point",
            {"start_objective": f0, "objective": f, "iterations": nit},
        )
    alpha, log_beta, nu = _to_stacy(theta)
    return GenGammaParams(
        alpha=alpha, nu=nu, log_beta=log_beta, loglik=-f * t.size,
        n_samples=int(t.size), max_wait=max_wait,
    )


# --------------------------------------------------------------------------
# gain/loss asymmetry


@dataclass(frozen=True)
class AsymmetryMeasure:
    """``d_m = mode_gain - mode_loss`` in days; positive when losses arrive faster."""

    d_m: float
    mode_gain: float
    mode_loss: float
    method: str = "fitted"
    fit_gain: GenGammaParams | None = field(default=None, compare=False)
    fit_loss: GenGammaParams | None = field(default=None, compare=False)


def histogram_mode(samples: FptSamples) -> float:
    """Center of the highest log-binned density bin."""
    centers, density = binned_density(empirical_distribution(samples, binned=True))
    return float(centers[int(np.argmax(density))])


def asymmetry(
    samples_gain: FptSamples,
    samples_loss: FptSamples,
    method: str = "fitted",
    max_wait: float | None = None,
) -> AsymmetryMeasure:
    """Gap between the most likely waiting times for gains and losses.

    ``method="fitted"`` uses the modes of generalized gamma fits (optionally
    right-truncated at ``max_wait``); ``method="histogram"`` uses the peak of
    the log-binned empirical density.
    """
    if method == "fitted":
        fg = fit_gengamma(samples_gain, max_wait=max_wait)
        fl = fit_gengamma(samples_loss, max_wait=max_wait)
        mg, ml = gengamma_mode(fg), gengamma_mode(fl)
        return AsymmetryMeasure(mg - ml, mg, ml, method, fg, fl)
    if method == "histogram":
        mg, ml = histogram_mode(samples_gain), histogram_mode(samples_loss)
        return AsymmetryMeasure(mg - ml, mg, ml, method)
    raise DomainError(f"unknown asymmetry method {method!r}")


# --------------------------------------------------------------------------
# straight lines


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float = float("nan")

    def predict(self, xs):
        return self.intercept + self.slope * np.asarray(xs, dtype=float)


def linear_fit(xs, ys) -> LinearFit:
    """Ordinary least squares ``y = intercept + slope x`` with r**2."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise SizeError("xs and ys differ in length")
    if x.size < 3:
        raise SizeError(f"linear fit needs >= 3 points, got {x.size}")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateInputError("all xs are equal")
    dy = y - y.mean()
    slope = float(dx @ dy) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - intercept - slope * x
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    r2 = 0.0 if ss_tot == 0.0 else min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    stderr = math.sqrt(ss_res / (x.size - 2) / sxx) if x.size > 2 else float("nan")
    return LinearFit(slope, intercept, r2, stderr)
