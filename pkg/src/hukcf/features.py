"""Patch extraction, 31-channel HOG, cosine windowing and scale pyramids.

Image coordinates are continuous: pixel ``(i, j)`` covers ``[j, j+1) x
[i, i+1)``, so a box ``(x, y, w, h)`` has center ``(x + w/2, y + h/2)``.
Color frames follow the OpenCV BGR channel order.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import cv2
import numpy as np

from . import _backend
from .errors import DoubleWindowing, EmptyImage, PatchTooSmall

CELL_SIZE = 4
HOG_CHANNELS = 31
_BGR_LUMA = np.array([0.114, 0.587, 0.299])


@dataclass(frozen=True)
class ImagePatch:
    pixels: np.ndarray
    origin: tuple  # (x0, y0) top-left in source coordinates, may be negative
    size: tuple  # (w, h)

    @property
    def center(self):
        return (self.origin[0] + self.size[0] / 2.0, self.origin[1] + self.size[1] / 2.0)


@dataclass(frozen=True)
class FeatureMap:
    data: np.ndarray  # (rows, cols, channels)
    window_applied: bool = False

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class ScalePool:
    num: int = 33
    base: float = 1.02
    factors: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num < 1 or self.num % 2 == 0:
            raise ValueError(f"number of scales must be odd, got {self.num}")
        if self.num > 1 and not self.base > 1:
            raise ValueError(f"scale base must exceed 1, got {self.base}")
        half = (self.num - 1) // 2
        exps = np.arange(-half, half + 1)
        object.__setattr__(self, "factors", float(self.base) ** exps.astype(np.float64))

    @property
    def middle(self):
        return self.num // 2


def to_gray(image):
    """Single-channel float64 image; integer inputs are scaled to [0, 1]."""
    image = np.asarray(image)
    if image.size == 0:
        raise EmptyImage("empty image")
    scale = 1.0 / 255.0 if np.issubdtype(image.dtype, np.integer) else 1.0
    if image.ndim == 3:
        if image.shape[2] == 1:
            image = image[:, :, 0]
        elif image.dtype in (np.uint8, np.uint16, np.float32):
            image = cv2.cvtColor(np.ascontiguousarray(image[:, :, :3]), cv2.COLOR_BGR2GRAY)
        else:
            image = image[:, :, :3].astype(np.float64) @ _BGR_LUMA
    if scale == 1.0:
        return image.astype(np.float64, copy=False)
    return image.astype(np.float64) * scale


def extract_patch(image, center, size):
    """Crop a ``size = (w, h)`` patch centered at ``center = (x, y)``.

    Out-of-bounds pixels replicate the nearest image edge.
    """
    image = np.asarray(image)
    if image.size == 0 or image.ndim < 2 or 0 in image.shape[:2]:
        raise EmptyImage("cannot extract a patch from an empty image")
    w, h = int(size[0]), int(size[1])
    if w < 1 or h < 1:
        raise ValueError(f"patch size must be positive, got {size}")
    x0 = int(np.floor(center[0] - w / 2.0 + 0.5))
    y0 = int(np.floor(center[1] - h / 2.0 + 0.5))
    H, W = image.shape[:2]
    if x0 >= 0 and y0 >= 0 and x0 + w <= W and y0 + h <= H:
        pixels = image[y0:y0 + h, x0:x0 + w]
    else:
        ys = np.clip(np.arange(y0, y0 + h), 0, H - 1)
        xs = np.clip(np.arange(x0, x0 + w), 0, W - 1)
        pixels = image[ys[:, None], xs[None, :]]
    return ImagePatch(pixels, (x0, y0), (w, h))


def hog(patch, cell=CELL_SIZE):
    """31-channel Felzenszwalb HOG (18 signed + 9 unsigned orientations + 4 energy)."""
    pixels = patch.pixels if isinstance(patch, ImagePatch) else patch
    gray = to_gray(pixels)
    if gray.shape[0] < cell or gray.shape[1] < cell:
        raise PatchTooSmall(f"patch {gray.shape[1]}x{gray.shape[0]} smaller than one {cell}px cell")
    return FeatureMap(_backend.fhog(np.ascontiguousarray(gray), cell))


@lru_cache(maxsize=64)
def hann2d(rows, cols):
    win = np.outer(np.hanning(rows), np.hanning(cols))
    win.flags.writeable = False
    return win


def cosine_window(fmap):
    if fmap.window_applied:
        raise DoubleWindowing("cosine window already applied to this feature map")
    rows, cols = fmap.data.shape[:2]
    win = hann2d(rows, cols)
    data = fmap.data * (win[:, :, None] if fmap.data.ndim == 3 else win)
    return FeatureMap(data, window_applied=True)


def resize(pixels, size):
    """Bilinear resize to ``size = (w, h)``; a no-op when sizes already match."""
    w, h = int(size[0]), int(size[1])
    if pixels.shape[1] == w and pixels.shape[0] == h:
        return pixels
    return cv2.resize(pixels, (w, h), interpolation=cv2.INTER_LINEAR)


def sample_window(image, center, size, out_size):
    """Bilinear sample of a ``size = (w, h)`` window (sub-pixel, any scale) into ``out_size``.

    Equivalent to extracting the window centered exactly at ``center`` and
    resizing it, in one interpolation step; borders replicate.
    """
    gray = np.asarray(image, dtype=np.float64)
    if gray.size == 0 or gray.ndim != 2:
        raise EmptyImage("cannot sample from an empty image")
    ow, oh = int(out_size[0]), int(out_size[1])
    if ow < 1 or oh < 1 or not (size[0] > 0 and size[1] > 0):
        raise ValueError(f"window and output sizes must be positive, got {size} -> {out_size}")
    sx = float(size[0]) / ow
    sy = float(size[1]) / oh
    M = np.array([
        [sx, 0.0, center[0] - size[0] / 2.0 + 0.5 * sx - 0.5],
        [0.0, sy, center[1] - size[1] / 2.0 + 0.5 * sy - 0.5],
    ])
    return cv2.warpAffine(
        gray, M, (ow, oh),
        flags=cv2.INTER_LINEAR | cv2.WARP_INVERSE_MAP,
        borderMode=cv2.BORDER_REPLICATE,
    )


def build_scale_samples(image, center, base_size, pool, template_size, cell=CELL_SIZE):
    """HOG maps of ``s*W x s*H`` patches for every factor ``s`` in ``pool``.

    Each window is sampled straight onto ``template_size = (w, h)`` pixels
    (sub-pixel sizes, no rounding) before HOG, so all maps share one cell grid
    and neighbouring factors never collapse onto the same integer crop.
    """
    gray = to_gray(image)
    maps = []
    for k, s in enumerate(pool.factors):
        size = (s * base_size[0], s * base_size[1])
        try:
            maps.append(hog(sample_window(gray, center, size, template_size), cell))
        except (PatchTooSmall, EmptyImage) as exc:
            raise type(exc)(f"scale index {k} (factor {s:.4g}): {exc}") from exc
    return maps
