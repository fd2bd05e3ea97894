# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Felzenszwalb HOG cells and the per-bin Huber solve.

Mirrors ``_core_py``; both modules expose ``fhog`` and ``huber_solve`` with
identical signatures and results equal up to floating-point summation order.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, cos, sin, M_PI

cnp.import_array()

DEF NORIENT = 9
DEF NFEAT = 31
cdef double HOG_EPS = 0.0001
cdef double HOG_CLIP = 0.2
cdef double TEXTURE_GAIN = 0.2357


def fhog(double[:, ::1] img, int cell):
    """31-channel HOG of a float64 grayscale image, ``(H//cell, W//cell, 31)``."""
    cdef Py_ssize_t ch = img.shape[0] // cell
    cdef Py_ssize_t cw = img.shape[1] // cell
    cdef Py_ssize_t H = ch * cell
    cdef Py_ssize_t W = cw * cell
    cdef double uu[NORIENT]
    cdef double vv[NORIENT]
    cdef int o
    for o in range(NORIENT):
        uu[o] = cos(o * M_PI / NORIENT)
        vv[o] = sin(o * M_PI / NORIENT)

    hist_arr = np.zeros((ch, cw, 2 * NORIENT), dtype=np.float64)
    cdef double[:, :, ::1] hist = hist_arr
    cdef Py_ssize_t x, y, ixp, iyp
    cdef double dx, dy, v, dot, best_dot, xp, yp, vx0, vy0, vx1, vy1
    cdef int best_o

    for y in range(H):
        for x in range(W):
            dx = img[y, x + 1 if x + 1 < W else W - 1] - img[y, x - 1 if x > 0 else 0]
            dy = img[y + 1 if y + 1 < H else H - 1, x] - img[y - 1 if y > 0 else 0, x]
            v = sqrt(dx * dx + dy * dy)
            best_dot = 0.0
            best_o = 0
            for o in range(NORIENT):
                dot = uu[o] * dx + vv[o] * dy
                if dot > best_dot:
                    best_dot = dot
                    best_o = o
                elif -dot > best_dot:
                    best_dot = -dot
                    best_o = o + NORIENT

            xp = (x + 0.5) / cell - 0.5
            yp = (y + 0.5) / cell - 0.5
            ixp = <Py_ssize_t>floor(xp)
            iyp = <Py_ssize_t>floor(yp)
            vx0 = xp - ixp
            vy0 = yp - iyp
            vx1 = 1.0 - vx0
            vy1 = 1.0 - vy0
            if iyp >= 0 and ixp >= 0:
                hist[iyp, ixp, best_o] += vy1 * vx1 * v
            if iyp >= 0 and ixp + 1 < cw:
                hist[iyp, ixp + 1, best_o] += vy1 * vx0 * v
            if iyp + 1 < ch and ixp >= 0:
                hist[iyp + 1, ixp, best_o] += vy0 * vx1 * v
            if iyp + 1 < ch and ixp + 1 < cw:
                hist[iyp + 1, ixp + 1, best_o] += vy0 * vx0 * v

    # block energies on an edge-replicated border
    pad_arr = np.empty((ch + 2, cw + 2), dtype=np.float64)
    cdef double[:, ::1] pad = pad_arr
    cdef Py_ssize_t i, j, I, J
    cdef double s
    for i in range(ch + 2):
        I = min(max(i - 1, 0), ch - 1)
        for j in range(cw + 2):
            J = min(max(j - 1, 0), cw - 1)
            s = 0.0
            for o in range(NORIENT):
                s += (hist[I, J, o] + hist[I, J, o + NORIENT]) ** 2
            pad[i, j] = s

    out_arr = np.zeros((ch, cw, NFEAT), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double n1, n2, n3, n4, h1, h2, h3, h4, t1, t2, t3, t4, val
    for i in range(ch):
        I = i + 1
        for j in range(cw):
            J = j + 1
            n1 = 1.0 / sqrt(pad[I, J] + pad[I + 1, J] + pad[I, J + 1] + pad[I + 1, J + 1] + HOG_EPS)
            n2 = 1.0 / sqrt(pad[I - 1, J] + pad[I, J] + pad[I - 1, J + 1] + pad[I, J + 1] + HOG_EPS)
            n3 = 1.0 / sqrt(pad[I, J - 1] + pad[I + 1, J - 1] + pad[I, J] + pad[I + 1, J] + HOG_EPS)
            n4 = 1.0 / sqrt(pad[I - 1, J - 1] + pad[I, J - 1] + pad[I - 1, J] + pad[I, J] + HOG_EPS)
            t1 = t2 = t3 = t4 = 0.0
            for o in range(2 * NORIENT):
                val = hist[i, j, o]
                h1 = min(val * n1, HOG_CLIP)
                h2 = min(val * n2, HOG_CLIP)
                h3 = min(val * n3, HOG_CLIP)
                h4 = min(val * n4, HOG_CLIP)
                out[i, j, o] = 0.5 * (h1 + h2 + h3 + h4)
                t1 += h1
                t2 += h2
                t3 += h3
                t4 += h4
            for o in range(NORIENT):
                val = hist[i, j, o] + hist[i, j, o + NORIENT]
                h1 = min(val * n1, HOG_CLIP)
                h2 = min(val * n2, HOG_CLIP)
                h3 = min(val * n3, HOG_CLIP)
                h4 = min(val * n4, HOG_CLIP)
                out[i, j, 2 * NORIENT + o] = 0.5 * (h1 + h2 + h3 + h4)
            out[i, j, 27] = TEXTURE_GAIN * t1
            out[i, j, 28] = TEXTURE_GAIN * t2
            out[i, j, 29] = TEXTURE_GAIN * t3
            out[i, j, 30] = TEXTURE_GAIN * t4
    return out_arr


def huber_solve(gamma1, gamma, double lam, double c):
    """Closed-form per-bin minimizer of ``g1*u**2/2 - g*u + lam*phi_c(u)``.

    Returns ``(u, bad)`` where ``bad`` is the flat index of the first bin
    with ``g1 == 0`` and ``|g| > lam`` (unbounded objective), else -1.
    """
    cdef double[::1] g1 = np.ascontiguousarray(gamma1, dtype=np.float64).ravel()
    cdef double[::1] g = np.ascontiguousarray(gamma, dtype=np.float64).ravel()
    out_arr = np.empty(g1.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, n = g1.shape[0]
    cdef Py_ssize_t bad = -1
    cdef double a, hi, lo
    for k in range(n):
        a = g1[k]
        if a > 0.0:
            hi = (g[k] - lam) / a
            if hi > c:
                out[k] = hi
                continue
            lo = (g[k] + lam) / a
            if lo < -c:
                out[k] = lo
                continue
            out[k] = c * g[k] / (c * a + lam)
        else:
            if g[k] - lam > 0.0 or g[k] + lam < 0.0:
                if bad < 0:
                    bad = k
                out[k] = 0.0
            else:
                out[k] = c * g[k] / lam
    return out_arr.reshape(np.shape(gamma1)), bad
