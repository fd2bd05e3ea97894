"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_backends.py [--frames 100]

Kernel timings call each backend module directly. Tracker throughput runs in a
subprocess per backend so the import-time selection is exercised as in use.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from hukcf import _backend

TRACKER_SNIPPET = """
import time
from hukcf import BACKEND
from hukcf.synthetic import translation_sequence
from hukcf.tracker import HuberKCFTracker, TrackerConfig
frames, boxes = translation_sequence(n_frames={n}, step=(2, 1), target=80, start=(100, 80))
for name, cfg in (("huber", TrackerConfig(use_scale=False)), ("huber+scale", TrackerConfig())):
    tr = HuberKCFTracker(cfg)
    t0 = time.perf_counter()
    tr.init(frames[0], boxes[0])
    for f in frames[1:]:
        tr.track(f)
    print(BACKEND, name, len(frames) / (time.perf_counter() - t0))
"""


def best_ms(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=5)) / number * 1e3


def kernel_table():
    rng = np.random.default_rng(0)
    img = rng.uniform(size=(128, 128))
    g1 = rng.uniform(0, 1e3, size=(32, 32))
    g = rng.uniform(-1e3, 1e3, size=(32, 32))
    rows = []
    for name, mod in sorted(_backend.available_backends().items()):
        rows.append((name, "fhog 128x128", best_ms(lambda: mod.fhog(img, 4), 20)))
        rows.append((name, "huber_solve 32x32", best_ms(lambda: mod.huber_solve(g1, g, 1e-2, 50.0), 200)))
    return rows


def tracker_table(n_frames):
    rows = []
    for pure in ("1", "0"):
        env = dict(os.environ, HUKCF_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", TRACKER_SNIPPET.format(n=n_frames)],
                             env=env, capture_output=True, text=True, check=True).stdout
        for line in out.splitlines():
            backend, variant, fps = line.split()
            rows.append((backend, variant, float(fps)))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=100)
    args = ap.parse_args(argv)

    print(f"{'backend':8s} {'kernel':20s} {'ms':>9s}")
    for backend, name, ms in kernel_table():
        print(f"{backend:8s} {name:20s} {ms:9.3f}")
    print()
    print(f"{'backend':8s} {'tracker':20s} {'fps':>9s}")
    for backend, variant, fps in tracker_table(args.frames):
        print(f"{backend:8s} {variant:20s} {fps:9.1f}")


if __name__ == "__main__":
    main()
