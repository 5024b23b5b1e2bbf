"""2-D DFT helpers, circular correlation and label/window generation.

Every function works on the trailing two axes, so a stack of planes of
shape (L, D, D) is transformed channel by channel.  The forward transform is
unnormalized and the inverse carries the 1/D^2 factor.
"""
import numpy as np

from .errors import ConjugateSymmetryError, InvalidInputError, ShapeError

IMAG_TOL = 1e-8


def _check_plane(p):
    if p.ndim < 2 or p.shape[-1] < 2 or p.shape[-2] < 2:
        raise InvalidInputError(f"expected planes of size >= 2x2, got shape {p.shape}")


def dft2(p):
    p = np.asarray(p)
    _check_plane(p)
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("dft2 input contains non-finite values")
    return np.fft.fft2(p, axes=(-2, -1))


def idft2(p, check=True):
    """Inverse transform of the spectrum of a real signal.

    The imaginary residue must stay below ``IMAG_TOL`` relative to the
    magnitude of the result (absolute for results of magnitude <= 1).
    """
    p = np.asarray(p)
    _check_plane(p)
    out = np.fft.ifft2(p, axes=(-2, -1))
    if check:
        resid = np.max(np.abs(out.imag)) if out.size else 0.0
        scale = max(1.0, float(np.max(np.abs(out.real))) if out.size else 0.0)
        if not resid < IMAG_TOL * scale:
            raise ConjugateSymmetryError(
                f"spectrum is not conjugate symmetric: imaginary residue {resid:.3e}")
    return np.ascontiguousarray(out.real)


def circular_correlate(theta, x):
    """Return F^-1(dft2(theta) * conj(dft2(x))).

    out[d] = sum_u theta[u] * x[u - d], indices taken mod D.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    if theta.shape != x.shape:
        raise ShapeError(f"size mismatch: {theta.shape} vs {x.shape}")
    return idft2(dft2(theta) * np.conj(dft2(x)))


def wrapped_offsets(D):
    """Signed circular distance of each index from the origin."""
    i = np.arange(D)
    return np.minimum(i, D - i)


def gaussian_label(D, sigma):
    """Gaussian regression target with its unit peak at index (0, 0)."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    d = wrapped_offsets(D).astype(float)
    g = np.exp(-0.5 * d**2 / sigma**2)
    return np.outer(g, g)


def hann_window(D):
    if D < 2:
        raise InvalidInputError("window size must be >= 2")
    w = np.hanning(D)
    return np.outer(w, w)


def signed_shift(index, D):
    """Map a circular index in [0, D) to the signed range [-D/2, D/2)."""
    return (index + D // 2) % D - D // 2
