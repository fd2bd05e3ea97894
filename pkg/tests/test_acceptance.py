"""Acceptance gate: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import os
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from hukcf import BACKEND
from hukcf.evaluation import EvalRecord, overlap, precision_curves
from hukcf.huber import BinCoefficients, HuberConfig, phi_prime, solve_bin, solve_filter
from hukcf.kernel import KernelConfig, gaussian_kernel_correlation
from hukcf.synthetic import occlusion_sequence, translation_sequence, zoom_sequence
from hukcf.tracker import HuberKCFTracker, TrackerConfig


def criterion(num, title):
    return pytest.mark.criterion(num, title)


def centers(boxes):
    b = np.asarray(boxes, dtype=np.float64)
    return b[:, :2] + b[:, 2:] / 2


def run_tracker(frames, box, cfg):
    tr = HuberKCFTracker(cfg)
    tr.init(frames[0], box)
    out = [tuple(box)]
    for f in frames[1:]:
        out.append(tr.track(f))
    return tr, out


@criterion("1", "closed-form optimality vs golden section, 10k bins")
def test_closed_form_optimality(record_property):
    rng = np.random.default_rng(2024)
    n = 10_000
    g1 = rng.uniform(0, 1e6, n)
    g2 = rng.uniform(-1e6, 1e6, n)
    g3 = rng.uniform(-1e6, 1e6, n)
    lam = rng.choice([1e-5, 1e-2, 1.0], n)
    c = rng.choice([1.0, 50.0, 500.0], n)

    t0 = time.perf_counter()
    sol = np.array([solve_bin(BinCoefficients(g1[i], g2[i], g3[i]), HuberConfig(lam[i], c[i])) for i in range(n)])
    ref_e = oracles.minimize_bins(g1, g2, lam, c)
    ref_f = oracles.minimize_bins(g1, g3, lam, c)
    elapsed = time.perf_counter() - t0

    e, f = sol[:, 0], sol[:, 1]
    rel = np.maximum(np.abs(e - ref_e) / np.maximum(1.0, np.abs(e)),
                     np.abs(f - ref_f) / np.maximum(1.0, np.abs(f)))
    res_e = np.abs(g1 * e - g2 + lam * phi_prime(e, c)) / np.maximum(1.0, np.abs(g2))
    res_f = np.abs(g1 * f - g3 + lam * phi_prime(f, c)) / np.maximum(1.0, np.abs(g3))
    record_property("detail", f"max rel err {rel.max():.2e}, max scaled residual "
                              f"{max(res_e.max(), res_f.max()):.2e}, {elapsed:.2f} s")
    assert rel.max() <= 1e-6
    assert res_e.max() < 1e-6 and res_f.max() < 1e-6
    assert elapsed < 5.0


@criterion("2", "branch continuity over a 1e5-point sweep")
def test_branch_continuity(record_property):
    worst = -np.inf
    for g1, lam, c in ((2.0, 0.1, 50.0), (1e-3, 1.0, 1.0), (1e4, 1e-5, 500.0), (0.5, 1.0, 50.0)):
        edge = c * g1 + lam  # the linear branches start beyond +-edge
        g2 = np.linspace(-1.5 * edge, 1.5 * edge, 100_000)
        coef = BinCoefficients(np.full_like(g2, g1), g2, np.zeros_like(g2))
        e = solve_filter(coef, HuberConfig(lam, c)).real
        assert np.any(e > c) and np.any(e < -c) and np.any(np.abs(e) <= c)
        # the slope never exceeds 1 / g1, so a jump is any excess over step / g1
        excess = np.abs(np.diff(e)) - np.diff(g2) / g1
        worst = max(worst, excess.max())
    record_property("detail", f"max jump beyond Lipschitz bound {worst:.2e}")
    assert worst <= 1e-8


@criterion("3", "FFT kernel vs direct all-shifts evaluation, 200 maps")
def test_kernel_oracle(record_property):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        h, w, ch = rng.integers(1, 17), rng.integers(1, 17), rng.integers(1, 5)
        x, z = rng.normal(size=(2, h, w, ch))
        if rng.random() < 0.25:
            x, z = x[:, :, 0], z[:, :, 0]
        sigma = rng.choice([0.2, 0.5, 2.0])
        k = gaussian_kernel_correlation(x, z, KernelConfig(sigma))
        ref = oracles.direct_kernel(x, z, sigma)
        worst = max(worst, float(np.max(np.abs(k - ref) / ref)))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max rel err {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-6
    assert elapsed < 10.0


def median_time(fn, runs=20):
    fn()
    ts = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts))


@criterion("4", "kernel time ratio 64x64 / 32x32 below 6")
def test_kernel_scaling(record_property):
    rng = np.random.default_rng(0)

    def ratio(channels):
        shape = (channels,) if channels > 1 else ()
        t = {}
        for n in (32, 64):
            x, z = rng.normal(size=(2, n, n) + shape)
            t[n] = median_time(lambda: gaussian_kernel_correlation(x, z))
        return t[64] / t[32]

    r = ratio(1)
    r31 = ratio(31)
    record_property("detail", f"ratio {r:.2f} on 2-D grids; {r31:.2f} with 31 channels (not gated)")
    assert r < 6.0


@criterion("5", "synthetic translation tracking")
def test_translation_tracking(record_property):
    frames, boxes = translation_sequence(n_frames=50, step=(3, 0), target=40)
    _, out = run_tracker(frames, boxes[0], TrackerConfig())
    err = np.hypot(*(centers(out) - centers(boxes)).T)

    frames_n, boxes_n = translation_sequence(n_frames=50, step=(3, 0), target=40, noise_sigma=5 / 255, seed=1)
    _, out_n = run_tracker(frames_n, boxes_n[0], TrackerConfig())
    err_n = np.hypot(*(centers(out_n) - centers(boxes_n)).T)
    frac = float(np.mean(err_n <= 2.0))
    record_property("detail", f"clean max err {err.max():.3f} px; noisy {100 * frac:.0f}% within 2 px, "
                              f"max {err_n.max():.3f} px")
    assert err.max() <= 1.0
    assert frac >= 0.95


def _otb_sequences():
    root = os.environ.get("HUKCF_OTB_ROOT")
    if not root:
        return None
    from hukcf.evaluation import discover

    return discover(Path(root))[:5]


@criterion("5-otb", "OTB smoke: huber OP@0.5 >= ridge - 2 points (non-gating)")
def test_otb_smoke(record_property):
    paths = _otb_sequences()
    if paths is None:
        pytest.skip("set HUKCF_OTB_ROOT to an OTB-layout dataset to run")
    from hukcf.evaluation import load_sequence, run_sequence

    scores = {}
    for variant, reg in (("huber", "huber"), ("ridge", "ridge")):
        cfg = TrackerConfig(regularizer=reg, use_scale=False)
        scores[variant] = np.mean([run_sequence(load_sequence(p), cfg).op.at(0.5) for p in paths])
    record_property("detail", f"huber {scores['huber']:.3f} vs ridge {scores['ridge']:.3f} "
                              f"on {len(paths)} sequences")
    if scores["huber"] < scores["ridge"] - 0.02:
        pytest.xfail("huber below ridge - 2 points on this subset")


@criterion("6", "synthetic zoom: final scale within 10%")
def test_zoom_tracking(record_property):
    frames, boxes = zoom_sequence(n_frames=40, rate=1.02, target=40)
    tr, _ = run_tracker(frames, boxes[0], TrackerConfig())
    truth = boxes[-1][2] / boxes[0][2]
    rel = tr.state.scale / truth - 1.0
    record_property("detail", f"estimated {tr.state.scale:.4f} vs true {truth:.4f} ({100 * rel:+.2f}%)")
    assert abs(rel) <= 0.10


@criterion("7", "PSR gate freezes the model under occlusion")
def test_psr_gate(record_property):
    frames, boxes, occluded = occlusion_sequence(n_frames=40, occluded=range(15, 25))
    assert len(occluded) == 10
    tr = HuberKCFTracker(TrackerConfig(psr_threshold=10.0))
    tr.init(frames[0], boxes[0])
    frozen = 0
    psrs = []
    for t, f in enumerate(frames[1:], 1):
        before = tr.model
        snap = (before.z_hat.tobytes(), before.h_hat.tobytes())
        tr.track(f)
        if t in occluded:
            psrs.append(tr.last_psr)
            frozen += snap == (tr.model.z_hat.tobytes(), tr.model.h_hat.tobytes())
    record_property("detail", f"{frozen}/10 occluded frames bit-identical, PSR max {max(psrs):.2f}")
    assert frozen >= 8


@criterion("8", "metric golden values")
def test_metric_goldens(record_property):
    assert overlap((0, 0, 2, 2), (1, 0, 2, 2)) == 1 / 3

    def rec(err, ov):
        return EvalRecord(0, (0, 0, 1, 1), (0, 0, 1, 1), err, ov)

    dp, op = precision_curves([rec(5.0, 0.9), rec(15.0, 0.55), rec(30.0, 0.2)])
    errs, ovs = (5.0, 15.0, 30.0), (0.9, 0.55, 0.2)
    hand_dp = [sum(e < p for e in errs) / 3 for p in range(51)]
    hand_op = [sum(o > t / 50 for o in ovs) / 3 for t in range(51)]
    assert dp.values.tolist() == hand_dp
    assert op.values.tolist() == hand_op
    assert dp.at(20) == 2 / 3 and op.at(0.5) == 2 / 3

    rng = np.random.default_rng(11)
    runs = [precision_curves([rec(e, o) for e, o in zip(rng.exponential(20, n), rng.uniform(0, 1, n))])
            for n in rng.integers(1, 200, 50)]
    frames, boxes = translation_sequence(n_frames=20, step=(4, 2), noise_sigma=10 / 255)
    _, out = run_tracker(frames, boxes[0], TrackerConfig(use_scale=False))
    from hukcf.evaluation import make_records

    runs.append(precision_curves(make_records(out, boxes)))
    mono = all(np.all(np.diff(d.values) >= 0) and np.all(np.diff(o.values) <= 0) for d, o in runs)
    record_property("detail", f"IoU 1/3 exact, 3-record fixture exact, monotone on {len(runs)} runs")
    assert mono


@criterion("9", "throughput: huber >= 60 fps, huber+scale >= 15 fps")
def test_throughput(record_property):
    frames, boxes = translation_sequence(n_frames=100, step=(2, 1), target=80, start=(100, 80))
    rates = {}
    for name, cfg in (("huber", TrackerConfig(use_scale=False)), ("huber+scale", TrackerConfig())):
        tr = HuberKCFTracker(cfg)
        t0 = time.perf_counter()
        tr.init(frames[0], boxes[0])
        for f in frames[1:]:
            tr.track(f)
        rates[name] = len(frames) / (time.perf_counter() - t0)
    record_property("detail", f"huber {rates['huber']:.0f} fps, huber+scale {rates['huber+scale']:.0f} fps "
                              f"({BACKEND} backend, {os.cpu_count()} cpu)")
    assert rates["huber"] >= 60
    assert rates["huber+scale"] >= 15
