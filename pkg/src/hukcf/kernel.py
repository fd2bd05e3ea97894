"""Gaussian kernel correlation over all cyclic shifts, via the FFT.

Shift convention: entry ``j`` of :func:`gaussian_kernel_correlation` is
``h(||z - roll(x, j)||**2)``, so when ``z`` is ``x`` displaced by ``d`` the
response peaks at ``j = d``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ChannelMismatch, DimensionMismatch
from .spectrum import fft2, ifft2


@dataclass(frozen=True)
class KernelConfig:
    sigma: float = 0.5

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def _as_stack(m):
    a = np.asarray(getattr(m, "data", m), dtype=np.float64)
    if a.ndim == 2:
        a = a[:, :, None]
    if a.ndim != 3:
        raise DimensionMismatch(f"expected (H, W) or (H, W, C), got shape {a.shape}")
    return a


def _check_pair(x, z):
    if x.shape[:2] != z.shape[:2]:
        raise DimensionMismatch(f"spatial shapes differ: {x.shape[:2]} vs {z.shape[:2]}")
    if x.shape[2] != z.shape[2]:
        raise ChannelMismatch(f"channel counts differ: {x.shape[2]} vs {z.shape[2]}")


def multichannel_corr(x, z):
    """Circular cross-correlation ``<x, roll(z, j)>`` summed over channels."""
    x = _as_stack(x)
    z = _as_stack(z)
    _check_pair(x, z)
    return ifft2((fft2(x) * np.conj(fft2(z))).sum(axis=2))


def gaussian_from_spectra(xf, zf, sigma, xx=None, zz=None):
    """Kernel response from per-channel spectra ``xf``, ``zf`` of shape (H, W, C).

    ``xx`` and ``zz`` are the squared norms of the spatial maps; they are
    recovered from the spectra when omitted.
    """
    h, w, nch = xf.shape
    m = h * w
    if xx is None:
        xx = float((xf.real**2 + xf.imag**2).sum()) / m
    if zz is None:
        zz = float((zf.real**2 + zf.imag**2).sum()) / m
    corr = ifft2((zf * np.conj(xf)).sum(axis=2))
    dist = np.maximum(xx + zz - 2.0 * corr, 0.0)
    return np.exp(-dist / (sigma * sigma * m * nch))


def gaussian_kernel_correlation(x, z, cfg=KernelConfig()):
    """Gaussian kernel between ``z`` and every cyclic shift of ``x``.

    Values lie in (0, 1]; the exponent is normalized by the total element
    count so ``sigma`` is independent of the map size.
    """
    x = _as_stack(x)
    z = _as_stack(z)
    _check_pair(x, z)
    return gaussian_from_spectra(
        fft2(x), fft2(z), cfg.sigma, xx=float((x * x).sum()), zz=float((z * z).sum())
    )
