"""OTB-style sequence loading, per-frame records, and precision curves.

On-disk layout of one sequence::

    <seq>/img/0001.jpg ...       frames, sorted by the number in the filename
    <seq>/groundtruth_rect.txt   x,y,w,h per line (1-indexed; ',', tab or space)
    <seq>/attrs.txt              optional, one attribute tag per line
    <seq>/sequence.cfg           optional key=value: start_frame, end_frame

Boxes are converted to 0-indexed continuous coordinates on load. Frames whose
ground truth is non-finite or empty (target out of view) are left out of
every metric denominator.
"""
import json
import re
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .errors import EmptyRecords, FrameCountMismatch, MissingGroundTruth
from .tracker import HuberKCFTracker


GROUNDTRUTH = "groundtruth_rect.txt"
ATTRS = "attrs.txt"
SEQUENCE_CFG = "sequence.cfg"
IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp"}

DP_THRESHOLDS = np.arange(51, dtype=np.float64)  # px
OP_THRESHOLDS = np.arange(51, dtype=np.float64) / 50.0


@dataclass
class Sequence:
    name: str
    frames: list
    boxes: np.ndarray  # (n, 4), NaN rows for out-of-view frames
    attributes: tuple = ()

    def __len__(self):
        return len(self.frames)

    def read_frame(self, i):
        img = cv2.imread(str(self.frames[i]), cv2.IMREAD_UNCHANGED)
        if img is None:
            raise OSError(f"cannot decode frame {self.frames[i]}")
        return img


@dataclass(frozen=True)
class EvalRecord:
    frame: int
    predicted: tuple
    truth: tuple
    center_error: float
    overlap: float


@dataclass(frozen=True)
class Curve:
    thresholds: np.ndarray
    values: np.ndarray

    @property
    def auc(self):
        return float(np.mean(self.values))

    def at(self, threshold):
        i = int(np.argmin(np.abs(self.thresholds - threshold)))
        return float(self.values[i])


@dataclass
class SequenceResult:
    name: str
    attributes: tuple
    boxes: list
    records: list
    fps: float
    dp: Curve = field(init=False)
    op: Curve = field(init=False)

    def __post_init__(self):
        self.dp, self.op = precision_curves(self.records)


def _frame_number(path):
    digits = re.findall(r"\d+", path.stem)
    return int(digits[-1]) if digits else -1


def _read_kv(path):
    out = {}
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def parse_groundtruth(text):
    """Parse ground-truth lines into an ``(n, 4)`` array, shifting 1-indexed x, y to 0-indexed."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        vals = [float(v) for v in re.split(r"[,\s]+", line) if v]
        if len(vals) != 4:
            raise ValueError(f"expected 4 numbers per ground-truth line, got {line!r}")
        rows.append(vals)
    boxes = np.array(rows, dtype=np.float64).reshape(-1, 4)
    boxes[:, :2] -= 1.0
    return boxes


def load_sequence(path):
    path = Path(path)
    gt_path = path / GROUNDTRUTH
    if not gt_path.is_file():
        raise MissingGroundTruth(f"{gt_path} not found")
    img_dir = path / "img"
    if not img_dir.is_dir():
        raise FileNotFoundError(f"{img_dir} not found")
    frames = sorted(
        (p for p in img_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: (_frame_number(p), p.name),
    )
    cfg_path = path / SEQUENCE_CFG
    if cfg_path.is_file():
        cfg = _read_kv(cfg_path)
        lo = int(cfg["start_frame"]) if "start_frame" in cfg else None
        hi = int(cfg["end_frame"]) if "end_frame" in cfg else None
        frames = [
            p for p in frames
            if (lo is None or _frame_number(p) >= lo) and (hi is None or _frame_number(p) <= hi)
        ]
    boxes = parse_groundtruth(gt_path.read_text())
    n = min(len(frames), len(boxes))
    if len(frames) != len(boxes):
        warnings.warn(
            f"{path.name}: {len(frames)} frames vs {len(boxes)} ground-truth boxes; truncating to {n}",
            FrameCountMismatch,
            stacklevel=2,
        )
    attrs = ()
    if (path / ATTRS).is_file():
        attrs = tuple(t.strip() for t in (path / ATTRS).read_text().splitlines() if t.strip())
    return Sequence(path.name, frames[:n], boxes[:n], attrs)


def discover(root, names=None):
    """Sequence directories under ``root`` (those holding a ground-truth file), by name."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} does not exist")
    found = sorted(p.name for p in root.iterdir() if (p / GROUNDTRUTH).is_file())
    if names:
        missing = sorted(set(names) - set(found))
        if missing:
            raise FileNotFoundError(f"sequences not found under {root}: {', '.join(missing)}")
        found = [n for n in found if n in set(names)]
    return [root / n for n in found]


def overlap(a, b):
    """Intersection over union of two ``(x, y, w, h)`` boxes."""
    ax, ay, aw, ah = (float(v) for v in a)
    bx, by, bw, bh = (float(v) for v in b)
    # capping at the box sizes keeps (x + w) - x rounding from pushing IoU past 1
    iw = min(max(0.0, min(ax + aw, bx + bw) - max(ax, bx)), aw, bw)
    ih = min(max(0.0, min(ay + ah, by + bh) - max(ay, by)), ah, bh)
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    return min(1.0, inter / union) if union > 0 else 0.0


def center_error(a, b):
    return float(np.hypot(a[0] + a[2] / 2.0 - b[0] - b[2] / 2.0, a[1] + a[3] / 2.0 - b[1] - b[3] / 2.0))


def valid_truth(box):
    box = np.asarray(box, dtype=np.float64)
    return bool(np.all(np.isfinite(box)) and box[2] > 0 and box[3] > 0)


def make_records(predicted, truth):
    records = []
    for i, (p, t) in enumerate(zip(predicted, truth)):
        if not valid_truth(t):
            continue
        p = tuple(float(v) for v in p)
        t = tuple(float(v) for v in t)
        records.append(EvalRecord(i, p, t, center_error(p, t), overlap(p, t)))
    return records


def precision_curves(records):
    """Distance-precision and overlap-precision curves.

    DP at ``pi`` is the fraction of frames with center error below ``pi``
    (0..50 px, step 1); OP at ``tau`` the fraction with overlap above
    ``tau`` (0..1, step 0.02).
    """
    if not records:
        raise EmptyRecords("no frames with valid ground truth")
    err = np.array([r.center_error for r in records])
    ov = np.array([r.overlap for r in records])
    dp = (err[None, :] < DP_THRESHOLDS[:, None]).mean(axis=1)
    op = (ov[None, :] > OP_THRESHOLDS[:, None]).mean(axis=1)
    return Curve(DP_THRESHOLDS, dp), Curve(OP_THRESHOLDS, op)


def curve_summary(dp, op):
    return {
        "auc_dp": dp.auc,
        "auc_op": op.auc,
        "dp_at_20": dp.at(20.0),
        "op_at_05": op.at(0.5),
    }


def _mean_curves(curves):
    return Curve(curves[0].thresholds, np.mean([c.values for c in curves], axis=0))


def aggregate(results, mode="per-frame"):
    """Overall curves plus one pair of curves per attribute tag.

    ``per-frame`` pools every record across sequences; ``per-sequence-mean``
    averages the per-sequence curves pointwise.
    """
    if mode not in ("per-frame", "per-sequence-mean"):
        raise ValueError(f"unknown aggregation mode {mode!r}")
    results = sorted(results, key=lambda r: r.name)
    if not results:
        raise EmptyRecords("nothing to aggregate")

    def combine(subset):
        if mode == "per-frame":
            return precision_curves([rec for r in subset for rec in r.records])
        return _mean_curves([r.dp for r in subset]), _mean_curves([r.op for r in subset])

    tags = sorted({t for r in results for t in r.attributes})
    per_attr = {t: combine([r for r in results if t in r.attributes]) for t in tags}
    return combine(results), per_attr


def run_sequence(seq, cfg=None):
    """Track ``seq`` from its first ground-truth box; FPS counts tracker calls only."""
    tracker = HuberKCFTracker(cfg)
    boxes = [tuple(float(v) for v in seq.boxes[0])]
    elapsed = 0.0
    first = seq.read_frame(0)
    t0 = time.perf_counter()
    tracker.init(first, boxes[0])
    elapsed += time.perf_counter() - t0
    for i in range(1, len(seq)):
        frame = seq.read_frame(i)
        t0 = time.perf_counter()
        box = tracker.track(frame)
        elapsed += time.perf_counter() - t0
        boxes.append(tuple(float(v) for v in box))
    fps = len(seq) / elapsed if elapsed > 0 else float("inf")
    return SequenceResult(seq.name, seq.attributes, boxes, make_records(boxes, seq.boxes), fps)


def _curve_json(c):
    return {"thresholds": c.thresholds.tolist(), "values": c.values.tolist()}


def metrics_dict(result):
    out = curve_summary(result.dp, result.op)
    out["dp_curve"] = _curve_json(result.dp)
    out["op_curve"] = _curve_json(result.op)
    out["fps"] = result.fps
    out["frames"] = len(result.boxes)
    return out


def _dump(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_boxes_csv(path, boxes):
    lines = ["frame,x,y,w,h"]
    lines += [f"{i},{b[0]!r},{b[1]!r},{b[2]!r},{b[3]!r}" for i, b in enumerate(boxes)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_sequence_outputs(out_dir, result):
    d = Path(out_dir) / result.name
    d.mkdir(parents=True, exist_ok=True)
    write_boxes_csv(d / "boxes.csv", result.boxes)
    _dump(d / "metrics.json", metrics_dict(result))


def summary_dict(results, mode="per-frame", variant=None):
    results = sorted(results, key=lambda r: r.name)
    (dp, op), per_attr = aggregate(results, mode)
    frames = sum(len(r.boxes) for r in results)
    seconds = sum(len(r.boxes) / r.fps for r in results if r.fps > 0)
    overall = curve_summary(dp, op)
    overall["dp_curve"] = _curve_json(dp)
    overall["op_curve"] = _curve_json(op)
    overall["fps"] = frames / seconds if seconds > 0 else float("inf")
    return {
        "variant": variant,
        "mode": mode,
        "sequences": {r.name: {**curve_summary(r.dp, r.op), "fps": r.fps} for r in results},
        "overall": overall,
        "attributes": {t: curve_summary(*c) for t, c in per_attr.items()},
    }


def write_summary(out_dir, results, mode="per-frame", variant=None):
    summary = summary_dict(results, mode, variant)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    _dump(Path(out_dir) / "summary.json", summary)
    return summary
