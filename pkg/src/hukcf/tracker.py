"""Kernelized correlation filter tracker with a Huber-regularized filter.

Per frame: kernel response at the previous state, position from the
response peak, scale from a 1-D filter over a scale pyramid, closed-form
filter solve on the new sample, and a model update gated by the
peak-to-sidelobe ratio of the translation response.
"""
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import BoxTooSmall, EmptyImage
from .features import (
    ScalePool,
    build_scale_samples,
    cosine_window,
    hog,
    sample_window,
    to_gray,
)
from .huber import HuberConfig, accumulate_bin_coefficients, solve_filter, solve_ridge
from .kernel import gaussian_from_spectra
from .spectrum import fft2, ifft2

MIN_BOX_SIZE = 8
REGULARIZERS = ("huber", "ridge")


@dataclass(frozen=True)
class TrackerConfig:
    lam: float = 1e-5
    c: float = 50.0
    sigma: float = 0.5
    psr_threshold: float = 10.0
    learning_rate: float = 0.02
    num_scales: int = 33
    scale_base: float = 1.02
    padding: float = 2.5
    template_cells: int = 32
    cell_size: int = 4
    label_sigma_factor: float = 0.1
    psr_exclusion: int = 11
    regularizer: str = "huber"
    use_scale: bool = True
    gate_scale_update: bool = True
    scale_learning_rate: float = 0.025
    scale_lambda: float = 0.01
    scale_sigma_factor: float = 0.25
    scale_model_max_area: float = 512.0
    min_scale: float = 0.2
    max_scale: float = 5.0
    subpixel: bool = True

    def __post_init__(self):
        positive = (
            "lam", "c", "sigma", "psr_threshold", "padding", "template_cells", "cell_size",
            "label_sigma_factor", "psr_exclusion", "scale_base", "scale_lambda",
            "scale_sigma_factor", "scale_model_max_area", "min_scale", "max_scale",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("learning_rate", "scale_learning_rate"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {getattr(self, name)}")
        if self.num_scales < 1 or self.num_scales % 2 == 0:
            raise ValueError(f"num_scales must be odd, got {self.num_scales}")
        if self.regularizer not in REGULARIZERS:
            raise ValueError(f"regularizer must be one of {REGULARIZERS}, got {self.regularizer!r}")
        if self.min_scale > self.max_scale:
            raise ValueError("min_scale exceeds max_scale")

    @classmethod
    def field_types(cls):
        return {f.name: f.type for f in fields(cls)}


@dataclass(frozen=True)
class TargetState:
    center: tuple  # (x, y) px
    base_size: tuple  # (W, H) px at scale 1
    scale: float = 1.0

    @property
    def size(self):
        return (self.base_size[0] * self.scale, self.base_size[1] * self.scale)

    @property
    def box(self):
        w, h = self.size
        return (self.center[0] - w / 2.0, self.center[1] - h / 2.0, w, h)


@dataclass(frozen=True)
class TrackerModel:
    z_hat: np.ndarray  # (rows, cols, channels) appearance spectrum
    h_hat: np.ndarray  # (rows, cols) conjugate filter spectrum
    scale_num: np.ndarray | None = None  # (features, scales)
    scale_den: np.ndarray | None = None  # (scales,)
    frame_index: int = 0


@dataclass(frozen=True)
class ResponseMap:
    values: np.ndarray
    peak: tuple  # (row, col)
    peak_value: float

    @classmethod
    def from_values(cls, values):
        peak = np.unravel_index(int(np.argmax(values)), values.shape)
        return cls(values, (int(peak[0]), int(peak[1])), float(values[peak]))


def psr(response, exclusion=11):
    """Peak-to-sidelobe ratio ``(R_max - mu) / sigma``.

    The sidelobe is every cell outside an ``exclusion x exclusion`` window
    around the peak (wrapping at the borders, since responses are circular).
    Returns 0 when the peak does not rise above the sidelobe mean and
    ``inf`` when the sidelobe is flat or empty otherwise.
    """
    if not isinstance(response, ResponseMap):
        response = ResponseMap.from_values(np.asarray(response, dtype=np.float64))
    values = response.values
    rows, cols = values.shape
    half = exclusion // 2
    mask = np.ones(values.shape, dtype=bool)
    ri = np.arange(response.peak[0] - half, response.peak[0] + half + 1) % rows
    ci = np.arange(response.peak[1] - half, response.peak[1] + half + 1) % cols
    mask[np.ix_(ri, ci)] = False
    side = values[mask]
    if side.size == 0:
        return float("inf")
    mu = side.mean()
    sd = side.std()
    num = response.peak_value - mu
    if sd < 1e-12:
        return 0.0 if abs(num) <= 1e-12 * max(1.0, abs(response.peak_value)) else float("inf")
    return float(num / sd)


def gaussian_label(rows, cols, sigma):
    """2-D Gaussian peaked at shift (0, 0) with wrap-around."""
    dy = (np.arange(rows) + rows // 2) % rows - rows // 2
    dx = (np.arange(cols) + cols // 2) % cols - cols // 2
    return np.exp(-0.5 * (dy[:, None] ** 2 + dx[None, :] ** 2) / sigma**2)


def _subpixel(left, center, right):
    den = 2.0 * center - left - right
    if den <= 1e-12:
        return 0.0
    return float(np.clip(0.5 * (right - left) / den, -0.5, 0.5))


def _signed(i, n):
    return i - n if i > n // 2 else i


class HuberKCFTracker:
    """Single-target tracker; one instance per sequence.

    After :meth:`init`, call :meth:`track` once per frame. ``model`` and
    ``state`` are replaced (never mutated) so earlier snapshots stay valid.
    """

    def __init__(self, cfg=None):
        self.cfg = cfg or TrackerConfig()
        self.pool = ScalePool(self.cfg.num_scales, self.cfg.scale_base)
        self.model = None
        self.state = None
        self.last_psr = None
        self.last_updated = False

    # geometry -----------------------------------------------------------

    def _setup_geometry(self, base_size):
        cfg = self.cfg
        win = np.array(base_size, dtype=np.float64) * cfg.padding
        r = cfg.template_cells * cfg.cell_size / win.max()
        cells = np.maximum(np.round(win * r / cfg.cell_size).astype(int), 4)
        self.template_cells = (int(cells[0]), int(cells[1]))  # (cols, rows)
        self.template_px = (cells[0] * cfg.cell_size, cells[1] * cfg.cell_size)
        # extraction window at scale 1, in image px
        self.window_px = (self.template_px[0] / r, self.template_px[1] / r)
        cols, rows = self.template_cells
        sig = np.sqrt(rows * cols) / cfg.padding * cfg.label_sigma_factor
        self.label_hat = fft2(gaussian_label(rows, cols, sig))

        area = base_size[0] * base_size[1]
        f = np.sqrt(cfg.scale_model_max_area / area) if area > cfg.scale_model_max_area else 1.0
        self.scale_model_px = (
            max(cfg.cell_size, int(np.floor(base_size[0] * f))),
            max(cfg.cell_size, int(np.floor(base_size[1] * f))),
        )
        n = cfg.num_scales
        ss = np.arange(n) - n // 2
        scale_sigma = n / np.sqrt(33.0) * cfg.scale_sigma_factor
        self.scale_label_hat = np.fft.fft(np.exp(-0.5 * ss**2 / scale_sigma**2))
        self.scale_window = np.hanning(n) if n > 1 else np.ones(1)

    # features -----------------------------------------------------------

    def _translation_sample(self, gray, center, scale):
        size = (self.window_px[0] * scale, self.window_px[1] * scale)
        pixels = sample_window(gray, center, size, self.template_px)
        return cosine_window(hog(pixels, self.cfg.cell_size))

    def _scale_sample(self, gray, state):
        maps = build_scale_samples(
            gray, state.center, state.size, self.pool, self.scale_model_px, self.cfg.cell_size
        )
        xs = np.stack([m.data.ravel() for m in maps], axis=1)
        return np.fft.fft(xs * self.scale_window[None, :], axis=1)

    # training -----------------------------------------------------------

    def _solve(self, xf):
        kf = fft2(gaussian_from_spectra(xf, xf, self.cfg.sigma))
        coef = accumulate_bin_coefficients([kf], [self.label_hat])
        if self.cfg.regularizer == "ridge":
            return solve_ridge(coef, self.cfg.lam)
        return solve_filter(coef, HuberConfig(self.cfg.lam, self.cfg.c))

    def _train(self, gray, state, frame_index):
        xf = fft2(self._translation_sample(gray, state.center, state.scale).data)
        h = self._solve(xf)
        num = den = None
        if self.cfg.use_scale:
            sf = self._scale_sample(gray, state)
            num = self.scale_label_hat[None, :] * np.conj(sf)
            den = (sf.real**2 + sf.imag**2).sum(axis=0)
        return TrackerModel(xf, h, num, den, frame_index)

    # public API ---------------------------------------------------------

    def init(self, frame, box):
        """Train on the first frame; ``box = (x, y, w, h)`` is clipped to the image."""
        gray = to_gray(frame)
        H, W = gray.shape
        x, y, w, h = (float(v) for v in box)
        x1, y1 = max(x, 0.0), max(y, 0.0)
        x2, y2 = min(x + w, float(W)), min(y + h, float(H))
        if x2 - x1 < MIN_BOX_SIZE or y2 - y1 < MIN_BOX_SIZE:
            raise BoxTooSmall(
                f"box {box} is {x2 - x1:.1f}x{y2 - y1:.1f} px after clipping; "
                f"need at least {MIN_BOX_SIZE}x{MIN_BOX_SIZE}"
            )
        base = (x2 - x1, y2 - y1)
        self._setup_geometry(base)
        self.state = TargetState(((x1 + x2) / 2.0, (y1 + y2) / 2.0), base, 1.0)
        self.model = self._train(gray, self.state, 0)
        self.last_psr = None
        self.last_updated = True
        return self.model, self.state

    def response(self, frame, state=None, model=None):
        """Translation response of the search window at ``state``."""
        gray = to_gray(frame)
        state = state or self.state
        model = model or self.model
        fmap = self._translation_sample(gray, state.center, state.scale)
        k = gaussian_from_spectra(model.z_hat, fft2(fmap.data), self.cfg.sigma)
        return ResponseMap.from_values(ifft2(model.h_hat * fft2(k)))

    def detect_position(self, frame, state=None, model=None):
        """New target center from the response peak; returns ``(center, ResponseMap)``."""
        state = state or self.state
        resp = self.response(frame, state, model)
        values = resp.values
        rows, cols = values.shape
        pr, pc = resp.peak
        dy = float(_signed(pr, rows))
        dx = float(_signed(pc, cols))
        if self.cfg.subpixel:
            dy += _subpixel(values[(pr - 1) % rows, pc], values[pr, pc], values[(pr + 1) % rows, pc])
            dx += _subpixel(values[pr, (pc - 1) % cols], values[pr, pc], values[pr, (pc + 1) % cols])
        px_x = self.cfg.cell_size * self.window_px[0] * state.scale / self.template_px[0]
        px_y = self.cfg.cell_size * self.window_px[1] * state.scale / self.template_px[1]
        cx, cy = state.center
        return (cx + dx * px_x, cy + dy * px_y), resp

    def scale_response(self, frame, state=None, model=None):
        gray = to_gray(frame)
        state = state or self.state
        model = model or self.model
        sf = self._scale_sample(gray, state)
        num = (model.scale_num * sf).sum(axis=0)
        return np.fft.ifft(num / (model.scale_den + self.cfg.scale_lambda)).real

    def estimate_scale(self, frame, state=None, model=None):
        """Best pool factor times the current scale, clamped to the configured range."""
        state = state or self.state
        resp = self.scale_response(frame, state, model)
        factor = self.pool.factors[int(np.argmax(resp))]
        return float(np.clip(state.scale * factor, self.cfg.min_scale, self.cfg.max_scale))

    def update(self, frame, state=None, response=None, model=None, psr_value=None):
        """Blend a freshly trained model into the current one if the PSR gate opens.

        Returns the (possibly unchanged) model; the gate compares the PSR of
        ``response`` against ``psr_threshold``.
        """
        cfg = self.cfg
        state = state or self.state
        model = model or self.model
        if psr_value is None:
            psr_value = psr(response, cfg.psr_exclusion)
        gray = to_gray(frame)
        if psr_value > cfg.psr_threshold:
            eps = cfg.learning_rate
            xf = fft2(self._translation_sample(gray, state.center, state.scale).data)
            h = self._solve(xf)
            z_hat = (1.0 - eps) * model.z_hat + eps * xf
            h_hat = (1.0 - eps) * model.h_hat + eps * h
            num, den = self._blend_scale(gray, state, model)
            return TrackerModel(z_hat, h_hat, num, den, model.frame_index + 1)
        if cfg.use_scale and not cfg.gate_scale_update:
            num, den = self._blend_scale(gray, state, model)
            return replace(model, scale_num=num, scale_den=den)
        return model

    def _blend_scale(self, gray, state, model):
        if not self.cfg.use_scale:
            return model.scale_num, model.scale_den
        eta = self.cfg.scale_learning_rate
        sf = self._scale_sample(gray, state)
        num = (1.0 - eta) * model.scale_num + eta * self.scale_label_hat[None, :] * np.conj(sf)
        den = (1.0 - eta) * model.scale_den + eta * (sf.real**2 + sf.imag**2).sum(axis=0)
        return num, den

    def track(self, frame):
        """Process one frame; returns the new box ``(x, y, w, h)``."""
        if self.model is None:
            raise RuntimeError("call init() before track()")
        gray = to_gray(frame)
        center, resp = self.detect_position(gray)
        state = replace(self.state, center=center)
        if self.cfg.use_scale:
            state = replace(state, scale=self.estimate_scale(gray, state))
        self.state = state
        self.last_psr = psr(resp, self.cfg.psr_exclusion)
        new_model = self.update(gray, state, resp, psr_value=self.last_psr)
        self.last_updated = new_model is not self.model
        self.model = new_model
        return state.box


def track_sequence(frames, init_box, cfg=None):
    """Boxes for every frame; the first is ``init_box`` itself."""
    frames = iter(frames)
    try:
        first = next(frames)
    except StopIteration:
        raise EmptyImage("sequence has no frames") from None
    tracker = HuberKCFTracker(cfg)
    tracker.init(first, init_box)
    boxes = [tuple(float(v) for v in init_box)]
    for frame in frames:
        boxes.append(tracker.track(frame))
    return boxes
