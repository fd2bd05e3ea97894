"""2-D DFT helpers and spectral algebra.

All transforms act on the two leading axes, so ``(H, W)`` grids and
``(H, W, C)`` multi-channel stacks are handled alike. Spectra are plain
complex ``ndarray`` objects holding the full ``H x W`` bin grid.

Normalization: the forward transform is unnormalized, the inverse scales by
``1 / (H * W)``.
"""
import numpy as np

from .errors import ConjugateSymmetryViolation, DimensionMismatch

# ifft2 discards the imaginary residue only below this fraction of the signal scale
IMAG_RESIDUE_RTOL = 1e-6


def fft2(x):
    """Forward unnormalized DFT over the two leading axes of a real grid."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D grid, got shape {x.shape}")
    return np.fft.fft2(x, axes=(0, 1))


def ifft2(X, check=True):
    """Inverse DFT of the spectrum of a real signal, returning the real grid.

    Raises ConjugateSymmetryViolation when the imaginary part of the result
    exceeds ``IMAG_RESIDUE_RTOL`` of the largest real magnitude.
    """
    X = np.asarray(X)
    if X.ndim < 2:
        raise DimensionMismatch(f"expected a 2-D spectrum, got shape {X.shape}")
    out = np.fft.ifft2(X, axes=(0, 1))
    if check:
        scale = np.abs(out.real).max(initial=0.0)
        residue = np.abs(out.imag).max(initial=0.0)
        if residue > IMAG_RESIDUE_RTOL * max(scale, np.finfo(float).tiny):
            raise ConjugateSymmetryViolation(
                f"imaginary residue {residue:.3g} exceeds {IMAG_RESIDUE_RTOL:g} "
                f"of signal scale {scale:.3g}"
            )
    return np.ascontiguousarray(out.real)


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def spectral_mul(A, B, conjugate_b=False):
    """Element-wise complex product ``A * B`` (or ``A * conj(B)``)."""
    A = np.asarray(A)
    B = np.asarray(B)
    _check_same_shape(A, B)
    return A * (np.conj(B) if conjugate_b else B)


def circ_xcorr(x, z):
    """Circular cross-correlation over all cyclic shifts.

    Entry ``j`` of the result is ``<x, roll(z, j)>`` where ``roll`` moves
    ``z`` by ``j`` along the two leading axes. Multi-channel stacks are
    correlated channel by channel (no summation).
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    _check_same_shape(x, z)
    return ifft2(spectral_mul(fft2(x), fft2(z), conjugate_b=True))


def cyclic_shift(x, shift):
    """``np.roll`` over the two leading axes; ``shift`` is (rows, cols)."""
    return np.roll(x, shift, axis=(0, 1))
