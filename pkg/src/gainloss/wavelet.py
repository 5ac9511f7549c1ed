"""Periodic orthonormal discrete wavelet transform and high-pass filtrations.

Detail level ``j`` (1 = finest) holds fluctuations on horizons of roughly
``2**(j-1)`` to ``2**j`` days.  The filtration ``R_k`` keeps detail levels
``1 .. k-1`` and drops everything slower.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, SizeError
from .series import LogPriceSeries, ReturnSeries, rebuild

DEFAULT_FAMILY = "d4"


@lru_cache(maxsize=None)
def daubechies_filter(taps: int) -> tuple[float, ...]:
    """Low-pass filter of the Daubechies wavelet with ``taps`` coefficients.

    Built by spectral factorization: the half-band polynomial
    ``P(y) = sum_k C(N-1+k, k) y**k`` in ``y = sin**2(w/2)`` is mapped to
    ``z``, and the roots inside the unit circle form the minimum-phase factor.
    ``taps=2`` is Haar, ``taps=4`` is the classic D4.
    """
    if taps < 2 or taps % 2 or taps > 14:
        raise DomainError(f"Daubechies filters are available for even 2..14 taps, got {taps}")
    n = taps // 2
    if n == 1:
        return (math.sqrt(0.5), math.sqrt(0.5))
    y_of_z = np.array([-0.25, 0.5, -0.25])  # z * y(z)
    poly = np.zeros(1)
    for k in range(n):
        term = np.array([1.0])
        for _ in range(k):
            term = np.polymul(term, y_of_z)
        term = np.concatenate([term, np.zeros(n - 1 - k)])
        poly = np.polyadd(poly, math.comb(n - 1 + k, k) * term)
    roots = np.roots(poly)
    h = np.array([1.0])
    for _ in range(n):
        h = np.polymul(h, [1.0, 1.0])
    for r in roots[np.abs(roots) < 1]:
        h = np.polymul(h, [1.0, -r])
    h = np.real(h)
    h = h * math.sqrt(2.0) / h.sum()
    return tuple(float(v) for v in h)


def family_filter(family: str) -> np.ndarray:
    name = family.lower()
    if name == "haar":
        return np.array(daubechies_filter(2))
    m = re.fullmatch(r"d(\d+)", name)
    if m is None:
        raise DomainError(f"unknown wavelet family {family!r}; use 'haar' or 'd<taps>'")
    return np.array(daubechies_filter(int(m.group(1))))


def highpass_filter(lowpass: np.ndarray) -> np.ndarray:
    """Quadrature mirror: ``g[k] = (-1)**k h[L-1-k]``."""
    sign = np.where(np.arange(lowpass.size) % 2 == 0, 1.0, -1.0)
    return sign * lowpass[::-1]


@dataclass(frozen=True)
class WaveletSpec:
    family: str = DEFAULT_FAMILY
    levels: int = 10
    boundary: str = "periodic"

    def __post_init__(self):
        if int(self.levels) < 1:
            raise SizeError(f"levels must be >= 1, got {self.levels}")
        if self.boundary != "periodic":
            raise DomainError("only periodic boundaries are supported")
        h = family_filter(self.family)
        g = highpass_filter(h)
        # orthonormality of the filter pair, including even shifts
        for m in range(h.size // 2):
            target = 1.0 if m == 0 else 0.0
            if abs(h[: h.size - 2 * m] @ h[2 * m:] - target) > 1e-12:
                raise DomainError(f"filter {self.family} is not orthonormal")
            if max(abs(h[: h.size - 2 * m] @ g[2 * m:]), abs(g[: g.size - 2 * m] @ h[2 * m:])) > 1e-12:
                raise DomainError(f"filter {self.family} fails the mirror relation")

    @property
    def lowpass(self) -> np.ndarray:
        return family_filter(self.family)

    @property
    def block(self) -> int:
        return 1 << int(self.levels)


@dataclass(frozen=True, eq=False)
class Pyramid:
    """Detail coefficients ``details[0]`` (finest) .. ``details[J-1]`` and the
    level-J approximation.  ``truncated`` counts points dropped from the front."""

    details: tuple[np.ndarray, ...]
    approx: np.ndarray
    truncated: int = 0

    @property
    def length(self) -> int:
        return self.approx.size << len(self.details)

    def energy(self) -> float:
        return float(sum(d @ d for d in self.details) + self.approx @ self.approx)


def _index(n: int, taps: int) -> np.ndarray:
    return (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n


def _analysis_step(x, h, g):
    idx = _index(x.size, h.size)
    windows = x[idx]
    return windows @ h, windows @ g


def _synthesis_step(a, d, h, g):
    n = 2 * a.size
    out = np.zeros(n)
    np.add.at(out, _index(n, h.size), a[:, None] * h[None, :] + d[:, None] * g[None, :])
    return out


def _raw(x) -> np.ndarray:
    if isinstance(x, (LogPriceSeries, ReturnSeries)):
        return x.values
    return np.asarray(x, dtype=float).reshape(-1)


def truncate(x, spec: WaveletSpec):
    """Drop the oldest points so the length is a multiple of ``2**levels``."""
    v = _raw(x)
    usable = (v.size // spec.block) * spec.block
    if usable == 0:
        raise SizeError(
            f"series of length {v.size} is shorter than 2**{spec.levels} = {spec.block}"
        )
    return v[v.size - usable:], v.size - usable


def dwt(x, spec: WaveletSpec = WaveletSpec()) -> Pyramid:
    """Multilevel periodic DWT.  Orthonormal, so energy is preserved."""
    v, dropped = truncate(x, spec)
    h = spec.lowpass
    g = highpass_filter(h)
    details = []
    a = v
    for _ in range(spec.levels):
        a, d = _analysis_step(a, h, g)
        details.append(d)
    return Pyramid(tuple(details), a, dropped)


def idwt(pyramid: Pyramid, spec: WaveletSpec = WaveletSpec()) -> np.ndarray:
    """Inverse of :func:`dwt` (returns the truncated-length signal)."""
    if len(pyramid.details) != spec.levels:
        raise SizeError(f"pyramid has {len(pyramid.details)} levels, spec says {spec.levels}")
    a = np.asarray(pyramid.approx, dtype=float)
    for j in range(spec.levels - 1, -1, -1):
        d = np.asarray(pyramid.details[j], dtype=float)
        if d.size != a.size:
            raise SizeError(f"detail level {j + 1} has {d.size} coefficients, expected {a.size}")
        a = _synthesis_step(a, d, spec.lowpass, highpass_filter(spec.lowpass))
    return a


@dataclass(frozen=True, eq=False)
class Filtration:
    k: int
    series: LogPriceSeries
    family: str
    levels: int
    truncated_prefix_length: int

    def metadata(self) -> dict:
        return {
            "k": self.k,
            "family": self.family,
            "levels": self.levels,
            "truncated_prefix_length": self.truncated_prefix_length,
        }


def _check_k(k: int, spec: WaveletSpec) -> int:
    k = int(k)
    if not 2 <= k <= spec.levels:
        raise SizeError(f"cut level k={k} must lie in 2..{spec.levels}")
    return k


def band_pass(pyramid: Pyramid, keep_levels, keep_approx: bool, spec: WaveletSpec) -> np.ndarray:
    """Reconstruct from the selected detail levels (1-based) only."""
    keep = set(keep_levels)
    details = tuple(
        d if (j + 1) in keep else np.zeros_like(d) for j, d in enumerate(pyramid.details)
    )
    approx = pyramid.approx if keep_approx else np.zeros_like(pyramid.approx)
    return idwt(Pyramid(details, approx, pyramid.truncated), spec)


def high_pass_filtration(x, k: int, spec: WaveletSpec = WaveletSpec()) -> Filtration:
    """``R_k`` of a log-price path: detail levels ``1 .. k-1`` only.

    The approximation (which carries the mean) and detail levels ``>= k`` are
    zeroed, so the output has zero mean.
    """
    k = _check_k(k, spec)
    pyr = dwt(x, spec)
    out = band_pass(pyr, range(1, k), False, spec)
    return Filtration(k, LogPriceSeries(out), spec.family, spec.levels, pyr.truncated)


def low_pass_part(x, k: int, spec: WaveletSpec = WaveletSpec()) -> np.ndarray:
    """Complement of :func:`high_pass_filtration`: levels ``>= k`` plus approximation."""
    k = _check_k(k, spec)
    pyr = dwt(x, spec)
    return band_pass(pyr, range(k, spec.levels + 1), True, spec)


def high_pass_returns(ret: ReturnSeries, k: int, spec: WaveletSpec = WaveletSpec()) -> Filtration:
    """``R_k`` built by filtering the returns and cumulating them.

    Same frequency cut as :func:`high_pass_filtration`, but the transform sees
    the (nearly white) increments instead of the integrated path, which keeps
    decimation aliasing from leaking slow price swings back into fast scales.
    The path starts at 0.
    """
    k = _check_k(k, spec)
    pyr = dwt(ret, spec)
    kept = band_pass(pyr, range(1, k), False, spec)
    path = rebuild(ReturnSeries(kept, origin=0.0))
    return Filtration(k, path, spec.family, spec.levels, pyr.truncated)
