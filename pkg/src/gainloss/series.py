"""Price, log-price and return containers plus basic return arithmetic."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SizeError


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Strictly positive prices ``S_t`` with optional date labels."""

    values: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = _frozen(self.values)
        object.__setattr__(self, "values", values)
        if values.size < 2:
            raise SizeError(f"price series needs at least 2 points, got {values.size}")
        bad = np.flatnonzero(~(values > 0))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"price at index {i} is not strictly positive: {values[i]!r}")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != values.size:
                raise SizeError(
                    f"{len(labels)} labels for {values.size} prices"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class LogPriceSeries:
    """Log prices ``X_t``."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        object.__setattr__(self, "values", values)
        if values.size < 2:
            raise SizeError(f"log-price series needs at least 2 points, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("log-price series contains non-finite values")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Daily log returns ``X_t - X_{t-1}`` anchored at ``origin = X_0``."""

    values: np.ndarray
    origin: float = 0.0

    def __post_init__(self):
        values = _frozen(self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", float(self.origin))
        if values.size < 1:
            raise SizeError("return series is empty")
        if not np.all(np.isfinite(values)) or not np.isfinite(self.origin):
            raise DomainError("return series contains non-finite values")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SeriesStats:
    mean: float
    std: float
    skewness: float
    n: int = field(default=0)


def to_log(series: PriceSeries) -> LogPriceSeries:
    """Element-wise natural log of a price series."""
    if not isinstance(series, PriceSeries):
        series = PriceSeries(series)
    return LogPriceSeries(np.log(series.values))


def returns(series: LogPriceSeries) -> ReturnSeries:
    """First differences of a log-price path; the first value becomes the origin."""
    if not isinstance(series, LogPriceSeries):
        series = LogPriceSeries(series)
    x = series.values
    return ReturnSeries(np.diff(x), origin=x[0])


def rebuild(ret: ReturnSeries) -> LogPriceSeries:
    """Inverse of :func:`returns`: ``X_0 = origin`` and cumulative sums after it."""
    path = np.empty(ret.values.size + 1)
    path[0] = ret.origin
    np.cumsum(ret.values, out=path[1:])
    path[1:] += ret.origin
    return LogPriceSeries(path)


def permute_returns(ret: ReturnSeries, seed) -> ReturnSeries:
    """Uniformly shuffle the returns (Fisher-Yates, seeded); origin is kept.

    The multiset of returns, hence the total log-price change, is unchanged, so
    the rebuilt path starts and ends at the same values as the original.
    """
    rng = np.random.default_rng(seed)
    values = np.array(ret.values)
    rng.shuffle(values)
    return ReturnSeries(values, origin=ret.origin)


def stats(ret: ReturnSeries) -> SeriesStats:
    """Mean, sample standard deviation (n-1) and moment skewness of returns.

    Skewness is ``m3 / m2**1.5`` with plain (divisor n) central moments and is
    0 for a series without variation.
    """
    x = ret.values if isinstance(ret, ReturnSeries) else np.asarray(ret, dtype=float)
    n = x.size
    if n < 2:
        raise SizeError(f"stats needs at least 2 returns, got {n}")
    mean = float(np.mean(x))
    dev = x - mean
    m2 = float(np.dot(dev, dev) / n)
    m3 = float(np.dot(dev * dev, dev) / n)
    std = float(np.sqrt(m2 * n / (n - 1)))
    scale = m2**1.5
    skew = 0.0 if scale == 0.0 or x.min() == x.max() else m3 / scale
    return SeriesStats(mean=mean, std=std, skewness=skew, n=n)


def series_hash(values) -> str:
    """SHA-256 of the float64 little-endian bytes of ``values``."""
    arr = np.ascontiguousarray(np.asarray(values, dtype="<f8"))
    return hashlib.sha256(arr.tobytes()).hexdigest()


def derive_seed(master: int, *keys) -> int:
    """64-bit seed derived from a master seed and any hashable labels."""
    text = "\x1f".join([str(int(master))] + [str(k) for k in keys])
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")
