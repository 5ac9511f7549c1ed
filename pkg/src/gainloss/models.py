"""Seeded simulators: EGARCH(1,1), the (C-modified) retarded volatility model
and an iid Gaussian baseline.

Standard normal draws come from ``numpy.random.default_rng(seed)`` (PCG64 with
the ziggurat sampler), so a seed reproduces a path exactly for a given numpy
release.  The recursions themselves run under numba.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.special import log_ndtr

from .errors import DomainError, SimulationError, StationarityError
from .series import PriceSeries, ReturnSeries

ABS_NORMAL_MEAN = math.sqrt(2.0 / math.pi)
EGARCH_BURN_IN = 1000


@dataclass(frozen=True)
class EgarchParams:
    mu: float = 0.0
    a0: float = -0.70
    a1a: float = -0.15
    a1b: float = 0.20
    b1: float = 0.92

    def __post_init__(self):
        for name in ("mu", "a0", "a1a", "a1b", "b1"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"EGARCH parameter {name} is not finite")
        if abs(self.b1) >= 1:
            raise StationarityError(f"|b1| must be < 1 for stationarity, got {self.b1}")


@dataclass(frozen=True)
class RetardedParams:
    sigma: float = 0.013
    alpha: float = 0.985
    c: float = 1.0
    s0: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if not 0 <= self.alpha < 1:
            raise DomainError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not self.s0 > 0:
            raise DomainError(f"s0 must be > 0, got {self.s0}")
        if not math.isfinite(self.c):
            raise DomainError("c is not finite")

    def default_burn_in(self) -> int:
        return int(math.ceil(round(10.0 / (1.0 - self.alpha), 9)))


@dataclass(frozen=True)
class SimulationSpec:
    """Length ``T`` of the recorded path, discarded burn-in and seed.

    ``burn_in=None`` selects the model's default.
    """

    length: int
    burn_in: int | None = None
    seed: int = 0

    def __post_init__(self):
        if int(self.length) < 1:
            raise DomainError(f"length must be >= 1, got {self.length}")
        if self.burn_in is not None and int(self.burn_in) < 0:
            raise DomainError(f"burn_in must be >= 0, got {self.burn_in}")


def _log_abs_moment(p: float, q: float) -> float:
    """log E[exp(p z + q |z|)] for standard normal z."""
    u = 0.5 * (p + q) ** 2 + log_ndtr(p + q)
    v = 0.5 * (p - q) ** 2 + log_ndtr(q - p)
    return float(np.logaddexp(u, v))


def egarch_unconditional_variance(params: EgarchParams, tol: float = 1e-12) -> float:
    """Closed-form stationary variance of EGARCH(1,1) returns' innovations.

    With ``g(z) = a1a z + a1b (|z| - sqrt(2/pi))`` the stationary log-variance
    is ``a0/(1-b1) + sum_i b1**i g(z_i)``, so

        var = exp(a0/(1-b1)) * prod_i E[exp(b1**i g(z))].

    The product is cut once a factor is within ``tol`` of 1.
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    if abs(params.b1) >= 1:
        raise StationarityError(f"|b1| must be < 1, got {params.b1}")
    log_var = params.a0 / (1.0 - params.b1)
    weight = 1.0
    for _ in range(100_000):
        p = weight * params.a1a
        q = weight * params.a1b
        term = _log_abs_moment(p, q) - q * ABS_NORMAL_MEAN
        log_var += term
        if abs(math.expm1(term)) < tol:
            break
        weight *= params.b1
    return math.exp(log_var)


@numba.njit(cache=True)
def _egarch_kernel(z, mu, a0, a1a, a1b, b1, log_var0, abs_mean):
    n = z.shape[0]
    ret = np.empty(n)
    log_var = np.empty(n)
    lv = log_var0
    for t in range(n):
        if t > 0:
            zp = z[t - 1]
            lv = a0 + a1a * zp + a1b * (abs(zp) - abs_mean) + b1 * lv
        s2 = math.exp(lv)
        log_var[t] = lv
        ret[t] = mu - 0.5 * s2 + math.sqrt(s2) * z[t]
    return ret, log_var


def egarch_path(params: EgarchParams, spec: SimulationSpec):
    """Simulate EGARCH(1,1) and return ``(returns, log_variance, shocks)`` arrays.

    The arrays cover the recorded window only; ``shocks`` are the standardized
    innovations ``z_t = eps_t / sigma_t``.
    """
    burn = EGARCH_BURN_IN if spec.burn_in is None else int(spec.burn_in)
    var0 = egarch_unconditional_variance(params)
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal(burn + int(spec.length))
    ret, log_var = _egarch_kernel(
        z, params.mu, params.a0, params.a1a, params.a1b, params.b1,
        math.log(var0), ABS_NORMAL_MEAN,
    )
    return ret[burn:], log_var[burn:], z[burn:]


def simulate_egarch(params: EgarchParams, spec: SimulationSpec) -> ReturnSeries:
    """EGARCH(1,1) returns ``mu - sigma_t**2/2 + eps_t`` started at the
    unconditional variance; origin 0."""
    ret, _, _ = egarch_path(params, spec)
    return ReturnSeries(ret, origin=0.0)


@numba.njit(cache=True)
def _retarded_kernel(eps, alpha, c, floor_ratio):
    # Homogeneous of degree one in price, so the memory is carried relative to
    # the previous price: w = W_t / S_{t-1}.
    n = eps.shape[0]
    out = np.empty(n)
    w = 0.0
    for t in range(n):
        effective = 1.0 - c * w
        if effective <= 0.0:
            return out, t
        g = effective * eps[t]
        ratio = 1.0 + g
        if ratio <= floor_ratio:
            return out, t
        out[t] = math.log(ratio)
        w = alpha * (g + w) / ratio
    return out, -1


RETARDED_FLOOR = 0.01


def simulate_retarded(params: RetardedParams, spec: SimulationSpec) -> PriceSeries:
    """Prices of the retarded volatility model with memory strength ``c``.

    ``dS_t = S^R_t eps_t`` with ``S^R_t = S_{t-1} - c W_t`` and
    ``W_{t+1} = alpha (dS_t + W_t)``, ``W_0 = 0``, ``eps_t ~ N(0, sigma^2)``,
    so ``W_t = sum_{tau >= 1} alpha**tau dS_{t-tau}`` includes yesterday's move.
    The recorded path starts at ``s0`` after the burn-in.

    Raises
    ------
    SimulationError
        If the effective price ``S^R_t`` turns non-positive or a single step
        leaves less than 1% of the previous price.
    """
    burn = params.default_burn_in() if spec.burn_in is None else int(spec.burn_in)
    rng = np.random.default_rng(spec.seed)
    eps = params.sigma * rng.standard_normal(burn + int(spec.length))
    log_ratio, failed = _retarded_kernel(eps, params.alpha, params.c, RETARDED_FLOOR)
    if failed >= 0:
        raise SimulationError(
            f"retarded model hit the positivity guard at step {failed} "
            f"(seed {spec.seed}); re-seed or shorten the run",
            step=int(failed),
        )
    log_path = np.concatenate(([0.0], np.cumsum(log_ratio[burn:])))
    return PriceSeries(params.s0 * np.exp(log_path))


def simulate_iid_gaussian(mu: float, sigma: float, spec: SimulationSpec) -> ReturnSeries:
    """iid Normal(mu, sigma**2) returns, origin 0."""
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    rng = np.random.default_rng(spec.seed)
    return ReturnSeries(mu + sigma * rng.standard_normal(int(spec.length)), origin=0.0)
