"""Synthetic sequences with ground truth known by construction."""
from pathlib import Path

import cv2
import numpy as np

BACKGROUND = 128


def texture(size, seed=0, blur=2.0):
    """Smooth random texture of ``size = (w, h)``, uint8 values roughly in [40, 215]."""
    rng = np.random.default_rng(seed)
    w, h = size
    noise = rng.normal(size=(h, w))
    smooth = cv2.GaussianBlur(noise, (0, 0), blur)
    smooth = (smooth - smooth.mean()) / (smooth.std() + 1e-12)
    return np.clip(BACKGROUND + 45.0 * smooth, 0, 255).astype(np.uint8)


def _finish(frame, noise_sigma, rng):
    if noise_sigma > 0:
        frame = frame + rng.normal(scale=noise_sigma * 255.0, size=frame.shape)
    return np.clip(np.round(frame), 0, 255).astype(np.uint8)


def translation_sequence(n_frames=50, step=(3, 0), target=40, frame_size=(480, 360),
                         start=None, noise_sigma=0.0, seed=0):
    """A textured square moving ``step`` px per frame over a flat background.

    Returns ``(frames, boxes)`` with uint8 grayscale frames and exact
    ``(x, y, w, h)`` ground truth. ``noise_sigma`` is on the [0, 1] scale.
    """
    rng = np.random.default_rng(seed + 1)
    tex = texture((target, target), seed).astype(np.float64)
    W, H = frame_size
    if start is None:
        start = (60, (H - target) // 2)
    frames, boxes = [], []
    for t in range(n_frames):
        x = start[0] + step[0] * t
        y = start[1] + step[1] * t
        frame = np.full((H, W), float(BACKGROUND))
        frame[y:y + target, x:x + target] = tex
        frames.append(_finish(frame, noise_sigma, rng))
        boxes.append((float(x), float(y), float(target), float(target)))
    return frames, boxes


def zoom_sequence(n_frames=40, rate=1.02, target=40, frame_size=(480, 360), seed=0,
                  noise_sigma=0.0):
    """A textured square growing by ``rate`` per frame about a fixed center."""
    rng = np.random.default_rng(seed + 1)
    final = int(np.ceil(target * rate ** (n_frames - 1))) + 2
    tex = texture((4 * final, 4 * final), seed, blur=8.0)
    W, H = frame_size
    cx, cy = W / 2.0, H / 2.0
    frames, boxes = [], []
    for t in range(n_frames):
        side = target * rate**t
        # render at the exact (sub-pixel) size through an affine warp of the texture
        s = side / tex.shape[0]
        M = np.array([[s, 0.0, cx - side / 2.0], [0.0, s, cy - side / 2.0]])
        fg = cv2.warpAffine(tex.astype(np.float32), M, (W, H), flags=cv2.INTER_AREA)
        mask = cv2.warpAffine(np.ones(tex.shape, np.float32), M, (W, H), flags=cv2.INTER_LINEAR)
        frame = mask * fg + (1.0 - mask) * BACKGROUND
        frames.append(_finish(frame.astype(np.float64), noise_sigma, rng))
        boxes.append((cx - side / 2.0, cy - side / 2.0, side, side))
    return frames, boxes


def occlusion_sequence(n_frames=40, occluded=range(15, 25), step=(2, 0), target=40,
                       block_scale=1.6, frame_size=(480, 360), seed=0, block_value=90):
    """Translation sequence where ``occluded`` frames hide the target under a uniform block."""
    frames, boxes = translation_sequence(n_frames, step, target, frame_size, seed=seed)
    occluded = set(occluded)
    side = int(round(target * block_scale))
    for t in occluded:
        x, y, w, h = boxes[t]
        cx, cy = x + w / 2.0, y + h / 2.0
        x0, y0 = int(round(cx - side / 2.0)), int(round(cy - side / 2.0))
        f = frames[t].copy()
        f[max(y0, 0):y0 + side, max(x0, 0):x0 + side] = block_value
        frames[t] = f
    return frames, boxes, sorted(occluded)


def write_otb_sequence(seq_dir, frames, boxes, attributes=()):
    """Write frames and 1-indexed ground truth in the OTB on-disk layout."""
    seq_dir = Path(seq_dir)
    (seq_dir / "img").mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(frames, start=1):
        cv2.imwrite(str(seq_dir / "img" / f"{i:04d}.png"), f)
    lines = [",".join(repr(float(v)) for v in (x + 1, y + 1, w, h)) for x, y, w, h in boxes]
    (seq_dir / "groundtruth_rect.txt").write_text("\n".join(lines) + "\n")
    if attributes:
        (seq_dir / "attrs.txt").write_text("\n".join(attributes) + "\n")
    return seq_dir
