"""First passage times of a log-price path and their empirical distribution.

For a start day ``t`` and a signed level ``rho`` the waiting time is the
smallest ``s > 0`` with ``X[t+s] - X[t] >= rho`` (``<= rho`` when ``rho < 0``).
Every start ``t = 0 .. T-1`` is scanned; starts whose level is never reached
before the end of the series are dropped (censored).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyError, SizeError
from .series import LogPriceSeries

BINS_PER_DECADE = 10


@dataclass(frozen=True, eq=False)
class FptSamples:
    rho: float
    samples: np.ndarray
    starts_scanned: int
    starts_hit: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.int64).reshape(-1)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.rho == 0 or not np.isfinite(self.rho):
            raise DomainError("rho must be a finite non-zero level")
        if s.size != self.starts_hit or self.starts_hit > self.starts_scanned:
            raise SizeError("inconsistent FPT sample counts")
        if s.size and s.min() < 1:
            raise DomainError("waiting times must be >= 1")

    @property
    def hit_fraction(self) -> float:
        return self.starts_hit / self.starts_scanned if self.starts_scanned else 0.0

    def counts(self):
        """Unique waiting times and their multiplicities."""
        return np.unique(self.samples, return_counts=True)


@dataclass(frozen=True, eq=False)
class FptDistribution:
    support: np.ndarray
    probabilities: np.ndarray
    bin_edges: np.ndarray | None = None


def _values(x) -> np.ndarray:
    if isinstance(x, LogPriceSeries):
        return x.values
    x = LogPriceSeries(x)
    return x.values


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if rho == 0 or not np.isfinite(rho):
        raise DomainError(f"rho must be a finite non-zero level, got {rho}")
    return rho


def fpt_samples_naive(x, rho: float) -> FptSamples:
    """Reference implementation: a direct forward scan from every start."""
    rho = _check_rho(rho)
    v = _values(x).tolist()
    n = len(v)
    out = []
    for t in range(n - 1):
        base = v[t]
        if rho > 0:
            for j in range(t + 1, n):
                if v[j] - base >= rho:
                    out.append(j - t)
                    break
        else:
            for j in range(t + 1, n):
                if v[j] - base <= rho:
                    out.append(j - t)
                    break
    return FptSamples(rho, np.array(out, dtype=np.int64), n - 1, len(out))


class _SparseTable:
    """Range-extremum table: ``levels[k][i]`` covers ``x[i : i + 2**k]``."""

    def __init__(self, x: np.ndarray, upper: bool):
        op = np.maximum if upper else np.minimum
        self.levels = [x]
        k = 1
        while (1 << k) <= x.size:
            prev = self.levels[-1]
            half = 1 << (k - 1)
            self.levels.append(op(prev[:-half], prev[half:]))
            k += 1


def fpt_samples_fast(x, rho: float) -> FptSamples:
    """Same contract as :func:`fpt_samples_naive` in ``O(T log T)``.

    A sparse table of range maxima (minima for ``rho < 0``) lets every start
    jump forward by binary lifting: from the current frontier ``p`` it advances
    by ``2**k`` whenever no point in ``X[p+1 .. p+2**k]`` reaches the level.
    All starts are lifted together, vectorized over ``t``.

    The level test is ``extremum - X[t] >= rho`` rather than
    ``extremum >= X[t] + rho`` so that it rounds exactly like the direct scan;
    subtraction of a fixed value is monotone in floating point.
    """
    rho = _check_rho(rho)
    v = _values(x)
    n = v.size
    last = n - 1
    upper = rho > 0
    table = _SparseTable(v, upper)
    starts = np.arange(last, dtype=np.int64)
    base = v[:last]
    pos = starts.copy()
    for k in range(len(table.levels) - 1, -1, -1):
        step = 1 << k
        level = table.levels[k]
        room = pos + step <= last
        if not room.any():
            continue
        idx = np.where(room, pos + 1, 0)
        reach = level[idx] - base
        blocked = reach < rho if upper else reach > rho
        pos = np.where(room & blocked, pos + step, pos)
    hit = pos < last
    waits = (pos - starts + 1)[hit]
    return FptSamples(rho, waits, last, int(waits.size))


def fpt_samples(x, rho: float) -> FptSamples:
    return fpt_samples_fast(x, rho)


def log_bin_edges(max_wait: int, per_decade: int = BINS_PER_DECADE) -> np.ndarray:
    """Logarithmic bin edges covering ``[1, max_wait]``, merged so each
    bin contains at least one integer."""
    top = np.log10(max(max_wait, 1) + 1)
    raw = np.unique(np.ceil(10 ** np.arange(0, top + 1.0 / per_decade, 1.0 / per_decade)))
    raw = raw[raw <= max_wait + 1]
    if raw[-1] < max_wait + 1:
        raw = np.append(raw, max_wait + 1)
    return raw.astype(float)


def empirical_distribution(samples: FptSamples, binned: bool = False) -> FptDistribution:
    """Relative frequencies of the observed waiting times.

    ``binned=True`` also attaches logarithmic bin edges (10 per decade) for
    plotting; the probabilities are always the unbinned frequencies.
    """
    if samples.starts_hit == 0:
        raise EmptyError(f"no first passage observed for rho={samples.rho}")
    support, counts = samples.counts()
    prob = counts / counts.sum()
    edges = log_bin_edges(int(support[-1])) if binned else None
    return FptDistribution(support.astype(np.int64), prob, edges)


def binned_density(dist: FptDistribution, edges: np.ndarray | None = None):
    """Probability per unit time in logarithmic bins.

    Returns ``(centers, density)`` with geometric bin centers, omitting empty
    bins.
    """
    if edges is None:
        edges = dist.bin_edges if dist.bin_edges is not None else log_bin_edges(int(dist.support[-1]))
    mass, _ = np.histogram(dist.support, bins=edges, weights=dist.probabilities)
    width = np.diff(edges)
    centers = np.sqrt(edges[:-1] * np.maximum(edges[1:] - 1, edges[:-1]))
    keep = mass > 0
    return centers[keep], (mass / width)[keep]
