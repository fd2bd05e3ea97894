"""Pure-numpy kernels; fallback for the compiled ``_core`` extension."""
import numpy as np

NORIENT = 9
HOG_EPS = 0.0001
HOG_CLIP = 0.2
TEXTURE_GAIN = 0.2357

_UU = np.cos(np.arange(NORIENT) * np.pi / NORIENT)
_VV = np.sin(np.arange(NORIENT) * np.pi / NORIENT)


def _vote_coords(n, cell):
    p = (np.arange(n) + 0.5) / cell - 0.5
    i = np.floor(p).astype(np.intp)
    w0 = p - i
    return i, 1.0 - w0, w0


def fhog(img, cell):
    img = np.ascontiguousarray(img, dtype=np.float64)
    ch, cw = img.shape[0] // cell, img.shape[1] // cell
    H, W = ch * cell, cw * cell
    p = np.pad(img[:H, :W], 1, mode="edge")
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    v = np.sqrt(dx * dx + dy * dy)

    dots = dx[..., None] * _UU + dy[..., None] * _VV
    # interleave (dot_o, -dot_o) so argmax keeps the first strict maximum
    cand = np.empty(dots.shape[:2] + (2 * NORIENT,))
    cand[..., 0::2] = dots
    cand[..., 1::2] = -dots
    k = cand.argmax(axis=2)
    orient = k // 2 + NORIENT * (k % 2)

    iy, wy1, wy0 = _vote_coords(H, cell)
    ix, wx1, wx0 = _vote_coords(W, cell)
    idx, wts = [], []
    for oy, wy in ((0, wy1), (1, wy0)):
        cy = iy + oy
        for ox, wx in ((0, wx1), (1, wx0)):
            cx = ix + ox
            ok = ((cy >= 0) & (cy < ch))[:, None] & ((cx >= 0) & (cx < cw))[None, :]
            flat = (cy[:, None] * cw + cx[None, :]) * (2 * NORIENT) + orient
            idx.append(flat[ok])
            wts.append((wy[:, None] * wx[None, :] * v)[ok])
    hist = np.bincount(
        np.concatenate(idx), np.concatenate(wts), minlength=ch * cw * 2 * NORIENT
    ).reshape(ch, cw, 2 * NORIENT)

    energy = ((hist[..., :NORIENT] + hist[..., NORIENT:]) ** 2).sum(axis=2)
    P = np.pad(energy, 1, mode="edge")
    blocks = P[:-1, :-1] + P[1:, :-1] + P[:-1, 1:] + P[1:, 1:]
    norms = 1.0 / np.sqrt(blocks + HOG_EPS)
    # the four 2x2 blocks touching each cell: below-right, above-right, below-left, above-left
    n = np.stack(
        [norms[1:, 1:], norms[:-1, 1:], norms[1:, :-1], norms[:-1, :-1]], axis=-1
    )[:, :, None, :]

    sens = np.minimum(hist[..., None] * n, HOG_CLIP)
    insens = np.minimum((hist[..., :NORIENT] + hist[..., NORIENT:])[..., None] * n, HOG_CLIP)
    out = np.empty((ch, cw, 31))
    out[..., :18] = 0.5 * sens.sum(axis=3)
    out[..., 18:27] = 0.5 * insens.sum(axis=3)
    out[..., 27:31] = TEXTURE_GAIN * sens.sum(axis=2)
    return out


def huber_solve(gamma1, gamma, lam, c):
    g1 = np.asarray(gamma1, dtype=np.float64)
    g = np.asarray(gamma, dtype=np.float64)
    pos = g1 > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = (g - lam) / g1
        lo = (g + lam) / g1
        quad = c * g / (c * g1 + lam)
    out = np.where(pos & (hi > c), hi, np.where(pos & (lo < -c), lo, quad))
    degenerate = ~pos & ((g - lam > 0) | (g + lam < 0))
    bad = -1
    if degenerate.any():
        bad = int(np.flatnonzero(degenerate.ravel())[0])
        out = np.where(degenerate, 0.0, out)
    return out, bad
