import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladcf import checks
from ladcf.errors import ConjugateSymmetryError, InvalidInputError, ShapeError
from ladcf.spectral import (circular_correlate, dft2, gaussian_label, hann_window,
                            idft2, signed_shift)

seeds = st.integers(0, 2**32 - 1)


def test_impulse_has_flat_spectrum():
    p = np.zeros((8, 8))
    p[0, 0] = 1
    np.testing.assert_allclose(dft2(p), np.ones((8, 8)), atol=0)


def test_constant_plane_spectrum():
    c = 2.5
    spec = dft2(np.full((4, 4), c))
    assert spec[0, 0] == pytest.approx(16 * c)
    spec[0, 0] = 0
    np.testing.assert_allclose(spec, 0, atol=1e-12)


def test_dft_matches_direct_sum(rng):
    p = rng.standard_normal((8, 8))
    np.testing.assert_allclose(dft2(p), checks.direct_dft2(p), rtol=0, atol=1e-10)


def test_dc_bin_is_sum(rng):
    p = rng.standard_normal((5, 5))
    assert dft2(p)[0, 0].real == pytest.approx(p.sum(), abs=1e-12)


def test_non_finite_rejected():
    p = np.zeros((4, 4))
    p[1, 1] = np.nan
    with pytest.raises(InvalidInputError):
        dft2(p)


def test_too_small_rejected():
    with pytest.raises(InvalidInputError):
        dft2(np.zeros((1, 4)))


def test_flat_spectrum_inverts_to_impulse():
    out = idft2(np.ones((6, 6), dtype=complex))
    expected = np.zeros((6, 6))
    expected[0, 0] = 1
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_asymmetric_spectrum_rejected():
    spec = np.zeros((4, 4), dtype=complex)
    spec[0, 1] = 1j
    with pytest.raises(ConjugateSymmetryError):
        idft2(spec)


def test_channel_stack_transforms_per_plane(rng):
    p = rng.standard_normal((3, 6, 6))
    spec = dft2(p)
    for i in range(3):
        np.testing.assert_allclose(spec[i], np.fft.fft2(p[i]))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, D=st.integers(2, 32))
def test_round_trip(seed, D):
    p = np.random.default_rng(seed).standard_normal((D, D)) * 10
    back = idft2(dft2(p))
    assert np.max(np.abs(back - p)) <= 1e-10 * np.max(np.abs(p))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, D=st.integers(2, 16), a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_linearity(seed, D, a, b):
    rng = np.random.default_rng(seed)
    p, q = rng.standard_normal((2, D, D))
    lhs = dft2(a * p + b * q)
    rhs = a * dft2(p) + b * dft2(q)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, D=st.integers(2, 24))
def test_parseval(seed, D):
    p = np.random.default_rng(seed).standard_normal((D, D))
    spatial = np.sum(p * p)
    freq = np.sum(np.abs(dft2(p)) ** 2) / D**2
    assert freq == pytest.approx(spatial, rel=1e-9)


def test_correlate_with_impulse_reverses_x(rng):
    x = rng.standard_normal((6, 6))
    theta = np.zeros((6, 6))
    theta[0, 0] = 1
    out = circular_correlate(theta, x)
    # out[d] = x[-d mod D]
    reversed_x = np.roll(np.flip(x, axis=(0, 1)), 1, axis=(0, 1))
    np.testing.assert_allclose(out, reversed_x, atol=1e-12)
    np.testing.assert_allclose(out, checks.direct_correlate(theta, x), atol=1e-12)


def test_correlate_constants():
    c = 1.5
    out = circular_correlate(np.full((4, 4), c), np.full((4, 4), c))
    np.testing.assert_allclose(out, 16 * c * c, atol=1e-12)


def test_correlate_matches_direct_8x8(rng):
    a, b = rng.standard_normal((2, 8, 8))
    np.testing.assert_allclose(circular_correlate(a, b), checks.direct_correlate(a, b), atol=1e-10)


@pytest.mark.parametrize("D", range(2, 17))
def test_correlation_theorem_all_sizes(D):
    rng = np.random.default_rng(D)
    a, b = rng.standard_normal((2, D, D))
    np.testing.assert_allclose(circular_correlate(a, b), checks.direct_correlate(a, b), atol=1e-10)


def test_correlate_shape_mismatch():
    with pytest.raises(ShapeError):
        circular_correlate(np.zeros((4, 4)), np.zeros((5, 5)))


def test_gaussian_label_peak_and_symmetry():
    y = gaussian_label(9, 1.7)
    assert y[0, 0] == 1
    assert np.unravel_index(np.argmax(y), y.shape) == (0, 0)
    idx = (-np.arange(9)) % 9
    np.testing.assert_array_equal(y, y[idx][:, idx])


def test_gaussian_label_offset_value():
    y = gaussian_label(8, 1.0)
    assert y[1, 0] == pytest.approx(np.exp(-0.5), rel=1e-15)
    assert y[0, 7] == pytest.approx(np.exp(-0.5), rel=1e-15)


def test_gaussian_label_rejects_bad_sigma():
    with pytest.raises(InvalidInputError):
        gaussian_label(8, 0.0)


def test_hann_window_profile():
    w = hann_window(4)
    k = np.arange(4)
    expected = 0.5 * (1 - np.cos(2 * np.pi * k / 3))   # [0, .75, .75, 0]
    np.testing.assert_allclose(w[1], expected[1] * expected, atol=1e-15)
    np.testing.assert_allclose(expected, [0, 0.75, 0.75, 0], atol=1e-15)


def test_hann_window_peak_and_corners():
    w = hann_window(7)
    assert w[3, 3] == pytest.approx(1.0)
    assert w[0, 0] == 0 and w[-1, -1] == 0 and w[0, -1] == 0
    assert w.min() >= 0 and w.max() <= 1


@pytest.mark.parametrize("D, index, expected", [(8, 0, 0), (8, 3, 3), (8, 4, -4), (8, 7, -1), (5, 2, 2), (5, 3, -2)])
def test_signed_shift(D, index, expected):
    assert signed_shift(index, D) == expected
