"""Independent reference computations used as test oracles.

Nothing here imports the code under test; each routine is written from the
mathematical definition, favouring obviousness over speed.
"""
import math

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def huber_penalty(u, c):
    a = np.abs(u)
    return np.where(a > c, a, (u * u + c * c) / (2.0 * c))


def bin_objective(u, g1, g, lam, c):
    return 0.5 * g1 * u * u - g * u + lam * huber_penalty(u, c)


def shifted_objective(u, g1, g, lam, c):
    """``bin_objective`` minus its constant ``lam * c / 2``.

    Same minimizer, but small ``u**2`` terms are no longer swamped by
    ``c**2`` in floating point, which keeps golden section sharp.
    """
    a = np.abs(u)
    pen = np.where(a > c, a - 0.5 * c, u * u / (2.0 * c))
    return 0.5 * g1 * u * u - g * u + lam * pen


def golden_section(f, lo, hi, iters=200):
    """Vectorized golden-section minimization of a unimodal ``f`` on ``[lo, hi]``."""
    lo = np.array(lo, dtype=np.float64)
    hi = np.array(hi, dtype=np.float64)
    a = hi - GOLDEN * (hi - lo)
    b = lo + GOLDEN * (hi - lo)
    fa, fb = f(a), f(b)
    for _ in range(iters):
        left = fa <= fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        new_a = hi - GOLDEN * (hi - lo)
        new_b = lo + GOLDEN * (hi - lo)
        a_next = np.where(left, new_a, b)
        b_next = np.where(left, a, new_b)
        fa_next = np.where(left, f(new_a), fb)
        fb_next = np.where(left, fa, f(new_b))
        a, b, fa, fb = a_next, b_next, fa_next, fb_next
    return 0.5 * (lo + hi)


def minimize_bins(g1, g, lam, c):
    """Golden-section minimizer of the per-bin objective for arrays of bins (g1 > 0)."""
    g1 = np.asarray(g1, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    reach = (np.abs(g) + lam) / g1
    lo, hi = -reach - 1.0, reach + 1.0
    return golden_section(lambda u: shifted_objective(u, g1, g, lam, c), lo, hi)


def direct_kernel(x, z, sigma):
    """``h(||z - roll(x, j)||^2)`` evaluated shift by shift."""
    x = x if x.ndim == 3 else x[:, :, None]
    z = z if z.ndim == 3 else z[:, :, None]
    H, W, C = x.shape
    out = np.empty((H, W))
    for dy in range(H):
        for dx in range(W):
            d = np.sum((z - np.roll(x, (dy, dx), axis=(0, 1))) ** 2)
            out[dy, dx] = math.exp(-max(d, 0.0) / (sigma * sigma * H * W * C))
    return out


def brute_multichannel_corr(x, z):
    H, W, C = x.shape
    out = np.zeros((H, W))
    for dy in range(H):
        for dx in range(W):
            for ch in range(C):
                out[dy, dx] += np.sum(x[:, :, ch] * np.roll(z[:, :, ch], (dy, dx), axis=(0, 1)))
    return out


def reference_hog(img, cell=4):
    """Scalar 31-channel Felzenszwalb HOG.

    Gradients by centered differences with clamped (edge-replicated)
    neighbours; each pixel votes its magnitude into the signed orientation
    whose unit vector has the largest dot product with the gradient,
    bilinearly split over the four nearest cell centers. Each cell is
    normalized by the four 2x2 cell blocks containing it (clamped at the
    border), truncated at 0.2.
    """
    img = [[float(v) for v in row] for row in np.asarray(img)]
    ch, cw = len(img) // cell, len(img[0]) // cell
    H, W = ch * cell, cw * cell
    n = 9
    dirs = [(math.cos(o * math.pi / n), math.sin(o * math.pi / n)) for o in range(n)]
    hist = [[[0.0] * (2 * n) for _ in range(cw)] for _ in range(ch)]

    def px(y, x):
        return img[min(max(y, 0), H - 1)][min(max(x, 0), W - 1)]

    for y in range(H):
        for x in range(W):
            gx = px(y, x + 1) - px(y, x - 1)
            gy = px(y + 1, x) - px(y - 1, x)
            mag = math.hypot(gx, gy)
            best, bin_ = 0.0, 0
            for o, (u, v) in enumerate(dirs):
                d = u * gx + v * gy
                if d > best:
                    best, bin_ = d, o
                elif -d > best:
                    best, bin_ = -d, o + n
            fx = (x + 0.5) / cell - 0.5
            fy = (y + 0.5) / cell - 0.5
            x0, y0 = math.floor(fx), math.floor(fy)
            for cy, wy in ((y0, 1.0 - (fy - y0)), (y0 + 1, fy - y0)):
                for cx, wx in ((x0, 1.0 - (fx - x0)), (x0 + 1, fx - x0)):
                    if 0 <= cy < ch and 0 <= cx < cw:
                        hist[cy][cx][bin_] += wy * wx * mag

    def energy(i, j):
        i = min(max(i, 0), ch - 1)
        j = min(max(j, 0), cw - 1)
        return sum((hist[i][j][o] + hist[i][j][o + n]) ** 2 for o in range(n))

    out = np.zeros((ch, cw, 31))
    for i in range(ch):
        for j in range(cw):
            norms = []
            for di, dj in ((0, 0), (-1, 0), (0, -1), (-1, -1)):
                block = sum(energy(i + di + a, j + dj + b) for a in (0, 1) for b in (0, 1))
                norms.append(1.0 / math.sqrt(block + 1e-4))
            signed = hist[i][j]
            unsigned = [signed[o] + signed[o + n] for o in range(n)]
            for o in range(2 * n):
                out[i, j, o] = 0.5 * sum(min(signed[o] * k, 0.2) for k in norms)
            for o in range(n):
                out[i, j, 2 * n + o] = 0.5 * sum(min(unsigned[o] * k, 0.2) for k in norms)
            for t, k in enumerate(norms):
                out[i, j, 27 + t] = 0.2357 * sum(min(signed[o] * k, 0.2) for o in range(2 * n))
    return out
