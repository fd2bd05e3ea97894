"""Closed-form Huber-regularized filter solve, one frequency bin at a time.

The data term of the filter objective splits into independent per-bin
problems in the real part ``e`` and imaginary part ``f`` of the conjugate
filter spectrum. For one coordinate the problem is::

    minimize  gamma1 * u**2 / 2 - gamma * u + lam * phi(u)

with ``gamma = gamma2`` for ``e`` and ``gamma = gamma3`` for ``f``, where
``phi`` is quadratic inside ``[-c, c]`` and absolute-valued outside. The
objective is convex, so the stationary point is the minimizer and follows
from one of three branches.
"""
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DegenerateBin, DimensionMismatch, EmptyTrainingSet


@dataclass(frozen=True)
class HuberConfig:
    lam: float = 1e-5
    c: float = 50.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")


@dataclass(frozen=True)
class BinCoefficients:
    """Per-bin quadratic coefficients; scalars or equally-shaped grids."""

    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray


def accumulate_bin_coefficients(kernel_spectra, label_spectra):
    """Sum per-sample bin coefficients over J training samples.

    With ``a + bi`` a kernel bin and ``c + di`` the matching label bin::

        gamma1 = sum(a**2 + b**2)
        gamma2 = sum(a*c + b*d)
        gamma3 = sum(a*d - b*c)
    """
    kernel_spectra = [np.asarray(k) for k in kernel_spectra]
    label_spectra = [np.asarray(g) for g in label_spectra]
    if not kernel_spectra:
        raise EmptyTrainingSet("need at least one training sample")
    if len(kernel_spectra) != len(label_spectra):
        raise DimensionMismatch(
            f"{len(kernel_spectra)} kernel spectra vs {len(label_spectra)} label spectra"
        )
    shape = kernel_spectra[0].shape
    g1 = np.zeros(shape)
    g2 = np.zeros(shape)
    g3 = np.zeros(shape)
    for k, g in zip(kernel_spectra, label_spectra):
        if k.shape != shape or g.shape != shape:
            raise DimensionMismatch(f"spectrum shapes differ: {k.shape}, {g.shape} vs {shape}")
        a, b = k.real, k.imag
        c, d = g.real, g.imag
        g1 += a * a + b * b
        g2 += a * c + b * d
        g3 += a * d - b * c
    return BinCoefficients(g1, g2, g3)


def phi(u, c):
    """Huber-type penalty: ``|u|`` beyond the knee, ``(u**2 + c**2) / (2c)`` inside."""
    u = np.asarray(u, dtype=np.float64)
    out = np.where(np.abs(u) > c, np.abs(u), (u * u + c * c) / (2.0 * c))
    return out[()]


def phi_prime(u, c):
    u = np.asarray(u, dtype=np.float64)
    return np.clip(u / c, -1.0, 1.0)[()]


def bin_objective(u, gamma1, gamma, lam, c):
    """Per-coordinate objective minimized by :func:`solve_bin`."""
    u = np.asarray(u, dtype=np.float64)
    return 0.5 * gamma1 * u * u - gamma * u + lam * phi(u, c)


def _solve(gamma1, gamma, cfg):
    if np.shape(gamma1) != np.shape(gamma):
        raise DimensionMismatch(f"coefficient shapes differ: {np.shape(gamma1)} vs {np.shape(gamma)}")
    u, bad = _backend.huber_solve(gamma1, gamma, cfg.lam, cfg.c)
    if bad >= 0:
        shape = np.shape(gamma1)
        index = np.unravel_index(bad, shape) if shape else None
        raise DegenerateBin(
            "gamma1 == 0 with |gamma| > lam: objective unbounded below", index=index
        )
    return u


def solve_bin(coef, cfg):
    """Optimal ``(e, f)`` for a single bin."""
    g1 = np.array([coef.gamma1], dtype=np.float64)
    e = _solve(g1, np.array([coef.gamma2], dtype=np.float64), cfg)[0]
    f = _solve(g1, np.array([coef.gamma3], dtype=np.float64), cfg)[0]
    return float(e), float(f)


def solve_filter(coef, cfg):
    """Solve every bin independently; returns the complex spectrum ``e + i f``."""
    g1 = np.asarray(coef.gamma1, dtype=np.float64)
    if g1.size == 0:
        raise DimensionMismatch("empty coefficient grid")
    e = _solve(g1, coef.gamma2, cfg)
    f = _solve(g1, coef.gamma3, cfg)
    return e + 1j * f


def solve_ridge(coef, lam):
    """Plain l2 counterpart: ``(gamma2 + i gamma3) / (gamma1 + lam)``."""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    den = np.asarray(coef.gamma1, dtype=np.float64) + lam
    return (np.asarray(coef.gamma2) + 1j * np.asarray(coef.gamma3)) / den
