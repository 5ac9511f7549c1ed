from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .errors import DomainError, SizeError
from .series import LogPriceSeries, PriceSeries, ReturnSeries


def check_series(X, *, min_length: int = 2, name: str = "X") -> np.ndarray:
    """Coerce a 1-D series (or a single-column 2-D array) to float64.

    Series containers are unwrapped; NaN and inf are rejected.
    """
    if isinstance(X, (PriceSeries, LogPriceSeries, ReturnSeries)):
        X = X.values
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise SizeError(f"{name} must be one series; got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.size < min_length:
        raise SizeError(f"{name} needs at least {min_length} points, got {arr.size}")
    return arr


def check_positive_waits(samples) -> np.ndarray:
    arr = check_series(samples, min_length=1, name="samples")
    if np.any(arr <= 0):
        raise DomainError("waiting times must be positive")
    return arr
