import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from gainloss.errors import DomainError, SizeError
from gainloss.series import ReturnSeries, rebuild
from gainloss.wavelet import (
    WaveletSpec,
    daubechies_filter,
    dwt,
    family_filter,
    high_pass_filtration,
    high_pass_returns,
    highpass_filter,
    idwt,
    low_pass_part,
    truncate,
)

FAMILIES = ["haar", "d4", "d6", "d8", "d12"]


def test_d4_closed_form():
    s3, d = math.sqrt(3), 4 * math.sqrt(2)
    want = [(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d]
    assert_allclose(daubechies_filter(4), want, atol=1e-14)
    assert_allclose(family_filter("haar"), [2**-0.5, 2**-0.5])


@pytest.mark.parametrize("taps", [2, 4, 6, 8, 10, 12, 14])
def test_filter_moments(taps):
    h = np.array(daubechies_filter(taps))
    assert h.sum() == pytest.approx(math.sqrt(2), abs=1e-12)
    g = highpass_filter(h)
    k = np.arange(taps, dtype=float)
    for m in range(taps // 2):
        assert abs(np.sum(g * k**m)) < 1e-9 * max(1.0, taps**m)


def test_bad_family():
    with pytest.raises(DomainError):
        WaveletSpec("sym4")
    with pytest.raises(DomainError):
        family_filter("d5")
    with pytest.raises(SizeError):
        WaveletSpec("d4", 0)


def _matrix(n, h):
    g = highpass_filter(h)
    m = np.zeros((n, n))
    for i in range(n // 2):
        for k in range(h.size):
            m[i, (2 * i + k) % n] += h[k]
            m[n // 2 + i, (2 * i + k) % n] += g[k]
    return m


@pytest.mark.parametrize("family", FAMILIES)
def test_one_level_matches_matrix_oracle(family, rng):
    h = family_filter(family)
    x = rng.standard_normal(32)
    m = _matrix(32, h)
    assert_allclose(m @ m.T, np.eye(32), atol=1e-12)
    pyr = dwt(x, WaveletSpec(family, 1))
    assert_allclose(np.concatenate([pyr.approx, pyr.details[0]]), m @ x, atol=1e-12)


signals = arrays(float, st.sampled_from([64, 128, 256]), elements=st.floats(-1e3, 1e3, allow_nan=False))


@given(signals, st.sampled_from(FAMILIES), st.integers(1, 6))
def test_perfect_reconstruction_and_parseval(x, family, levels):
    spec = WaveletSpec(family, levels)
    pyr = dwt(x, spec)
    scale = max(1.0, float(np.max(np.abs(x))))
    assert np.max(np.abs(idwt(pyr, spec) - x)) <= 1e-10 * scale
    assert pyr.energy() == pytest.approx(float(x @ x), rel=1e-10, abs=1e-10 * scale**2)


pairs = st.sampled_from([64, 128]).flatmap(
    lambda n: st.tuples(*[arrays(float, n, elements=st.floats(-1e3, 1e3, allow_nan=False))] * 2))


@given(pairs, st.floats(-3, 3), st.sampled_from(FAMILIES))
def test_linearity(xy, c, family):
    x, y = xy
    spec = WaveletSpec(family, 4)
    k = 3
    lhs = high_pass_filtration(x + c * y, k, spec).series.values
    rhs = high_pass_filtration(x, k, spec).series.values + c * high_pass_filtration(y, k, spec).series.values
    assert_allclose(lhs, rhs, atol=1e-8 * max(1.0, np.abs(x).max(), np.abs(y).max()))


@given(signals, st.sampled_from(FAMILIES), st.integers(2, 5))
def test_high_plus_low_is_identity(x, family, k):
    spec = WaveletSpec(family, 5)
    hp = high_pass_filtration(x, k, spec).series.values
    lp = low_pass_part(x, k, spec)
    assert_allclose(hp + lp, x, atol=1e-9 * max(1.0, np.abs(x).max()))
    assert abs(hp.mean()) < 1e-9 * max(1.0, np.abs(x).max())


def test_constant_has_no_detail():
    spec = WaveletSpec("d4", 4)
    out = high_pass_filtration(np.full(64, 3.7), 4, spec)
    assert_allclose(out.series.values, 0.0, atol=1e-12)


def test_truncation_drops_oldest_points():
    spec = WaveletSpec("haar", 3)
    x = np.arange(21.0)
    kept, dropped = truncate(x, spec)
    assert dropped == 5 and kept[0] == 5.0
    f = high_pass_filtration(x, 2, spec)
    assert f.truncated_prefix_length == 5
    assert f.metadata() == {"k": 2, "family": "haar", "levels": 3, "truncated_prefix_length": 5}
    with pytest.raises(SizeError):
        truncate(np.arange(7.0), spec)
    with pytest.raises(SizeError):
        high_pass_filtration(x, 4, spec)


def test_returns_domain_filtration(rng):
    spec = WaveletSpec("d4", 6)
    r = rng.standard_normal(64 * 5) * 0.01
    f = high_pass_returns(ReturnSeries(r), 6, spec)
    assert f.series.values[0] == 0.0
    assert len(f.series) == r.size + 1
    # with the approximation removed each 64-block of increments sums to zero
    full = high_pass_returns(ReturnSeries(r), 6, WaveletSpec("haar", 6))
    inc = np.diff(full.series.values)
    assert_allclose(inc.sum(), 0.0, atol=1e-12)


def test_haar_highpass_by_hand():
    spec = WaveletSpec("haar", 2)
    x = np.array([1.0, 3.0, 2.0, 6.0])
    out = high_pass_filtration(x, 2, spec).series.values
    # level-1 detail keeps the within-pair deviations from each pair mean
    assert_allclose(out, [-1.0, 1.0, -2.0, 2.0])
