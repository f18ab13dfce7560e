"""Exit criteria for the detector, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (visible with ``-s`` or
in ``-v`` output summaries) before asserting.
"""
import json
import time

import numpy as np
import pytest

from wcsed import (DetectorConfig, FrameSpec, SignalBuffer, analyze, convolve_direct, convolve_fft,
                   default_scale_bank, detect_endpoints, frame_entropy, frame_deviation,
                   kernel_at_scale, mother_wavelet, scale_to_frequency)
from wcsed.cli import detect_file
from wcsed.framing import frame_indices
from wcsed.signal_io import save_wav
from wcsed.synth import random_corpus, synthesize_test_signal

CORPUS_SIZE = 60
CORPUS_SEED = 2024


def report(capsys, criterion, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def corpus_runs():
    runs = []
    t0 = time.perf_counter()
    for item in random_corpus(CORPUS_SIZE, seed=CORPUS_SEED):
        signal, label = synthesize_test_signal(item)
        runs.append((item, signal, label, analyze(signal)))
    return runs, time.perf_counter() - t0


def test_c1_scale_frequency_pairs(capsys):
    pairs = [(10, 3200), (23, 1391), (50, 640), (100, 320)]
    errs = [abs(scale_to_frequency(s, 48000) - f) / f for s, f in pairs]
    report(capsys, 1, max(errs) <= 0.05,
           "scale->Hz at 48 kHz " + ", ".join(f"{s}->{scale_to_frequency(s, 48000):.0f}" for s, _ in pairs)
           + f" (max rel err {max(errs):.2e}, tol 5%)")


def test_c2_synthetic_corpus_deviation(capsys, corpus_runs):
    runs, elapsed = corpus_runs
    starts, ends, within = [], [], 0
    for item, signal, label, det in runs:
        s, e = frame_deviation(label, det.endpoints)
        starts.append(s)
        ends.append(e)
        within += (abs(det.endpoints.start_frame - label.start_frame) <= 3
                   and abs(det.endpoints.end_frame - label.end_frame) <= 3)
    frac = within / len(runs)
    ok = (len(runs) >= 50 and np.mean(starts) <= 3.0 and np.mean(ends) <= 5.0
          and frac >= 0.95 and elapsed < 120)
    report(capsys, 2, ok,
           f"{len(runs)} items: start dev {np.mean(starts):.3f}% (<=3), end dev {np.mean(ends):.3f}% (<=5), "
           f"{100 * frac:.1f}% within +-3 frames (>=95), {elapsed:.1f}s (<120)")


def _frame_classes(item, n_samples):
    spec = FrameSpec(item.sample_rate)
    fs = item.sample_rate
    s0, s1 = item.speech_start * fs, item.speech_end * fs
    bursts = [(b.start * fs, b.end * fs) for b in item.bursts]
    speech, silence = [], []
    for i, (a, b) in enumerate(frame_indices(n_samples - 1, spec)):
        if a >= s0 and b < s1:
            speech.append(i)
        elif (b < s0 or a >= s1) and all(b < b0 or a >= b1 for b0, b1 in bursts):
            silence.append(i)
    return speech, silence


def test_c3_entropy_contrast(capsys, corpus_runs):
    runs, _ = corpus_runs
    ratios = []
    for item, signal, label, det in runs:
        speech, silence = _frame_classes(item, len(signal))
        ce = det.ce_l.values
        ratios.append(ce[speech].mean() / max(ce[silence].mean(), 1e-300))
    worst = min(ratios)
    report(capsys, 3, worst >= 2.0, f"min over items of mean ce_l(speech)/mean ce_l(silence) = {worst:.3g} (>=2)")


def test_c4_nsa_rejection(capsys, corpus_runs):
    runs, _ = corpus_runs
    checked, violations = 0, 0
    for item, signal, label, det in runs:
        fs = item.sample_rate
        separated = all(b.end <= item.speech_start - 0.1 or b.start >= item.speech_end + 0.1 for b in item.bursts)
        if not separated:
            continue
        checked += 1
        for b in item.bursts:
            b0, b1 = b.start * fs, b.end * fs
            for p in (det.endpoints.start_sample, det.endpoints.end_sample):
                violations += b0 <= p <= b1
    report(capsys, 4, checked > 0 and violations == 0,
           f"{violations} endpoints inside NSA bursts over {checked} qualifying items (need 0)")


def test_c5_convolution_equivalence(capsys):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        x = rng.uniform(-1, 1, rng.integers(2, 4097))
        h = rng.uniform(-1, 1, rng.integers(2, 4097))
        d = convolve_direct(x, h)
        worst = max(worst, np.max(np.abs(convolve_fft(x, h) - d)) / np.max(np.abs(d)))
    report(capsys, 5, worst <= 1e-9, f"1000 random pairs, max |fft-direct|/max|direct| = {worst:.2e} (<=1e-9)")


def test_c6_kernel_admissibility(capsys):
    base = mother_wavelet()
    worst_mean, worst_norm, count = 0.0, 0.0, 0
    for rate in (8000, 16000, 44100, 48000):
        bank = default_scale_bank(rate)
        for s in bank.hf_scales + bank.lf_scales:
            taps = kernel_at_scale(base, s, rate).taps
            worst_mean = max(worst_mean, abs(taps.mean()) / np.max(np.abs(taps)))
            worst_norm = max(worst_norm, abs(np.linalg.norm(taps) - 1.0))
            count += 1
    report(capsys, 6, worst_mean <= 1e-6 and worst_norm <= 1e-9,
           f"{count} kernels: max |mean|/max|tap| = {worst_mean:.1e} (<=1e-6), "
           f"max |L2-1| = {worst_norm:.1e} (<=1e-9)")


def test_c7_entropy_properties(capsys):
    rng = np.random.default_rng(7)
    bins = 100
    ok_bounds = ok_shift = ok_scale = True
    for _ in range(300):
        frame = rng.standard_normal(960) * rng.uniform(1e-6, 1.0) + rng.uniform(-1, 1)
        e = frame_entropy(frame, bins)
        ok_bounds &= 0.0 <= e <= np.log10(bins)
        ok_shift &= frame_entropy(frame + rng.uniform(-5, 5), bins) == e
        ok_scale &= frame_entropy(frame * rng.uniform(0.01, 100) * rng.choice([-1, 1]), bins) == e
    ok_const = frame_entropy(np.full(960, 0.37), bins) == 0.0
    equi = frame_entropy(np.repeat(np.arange(bins) + 0.5, 3), bins)
    ok_equi = abs(equi - np.log10(bins)) <= 1e-9
    ok = ok_bounds and ok_shift and ok_scale and ok_const and ok_equi
    report(capsys, 7, ok, f"bounds={ok_bounds} shift={ok_shift} scale={ok_scale} constant-zero={ok_const} "
                          f"equiprobable={equi:.12f} vs log10({bins})")


def test_c8_determinism(capsys, tmp_path):
    items = random_corpus(CORPUS_SIZE, seed=CORPUS_SEED)[:10]
    paths = []
    for it in items:
        signal, _ = synthesize_test_signal(it)
        p = tmp_path / f"{it.name}.wav"
        save_wav(p, signal)
        paths.append(p)
    config = DetectorConfig()
    baseline = None
    identical = True
    for run in range(10):
        out = tmp_path / f"run{run}"
        out.mkdir()
        blobs = []
        for p in paths:
            detect_file(str(p), str(out), config)
            blobs.append((out / f"{p.stem}.endpoints.json").read_bytes())
        if baseline is None:
            baseline = blobs
        identical &= blobs == baseline
    report(capsys, 8, identical, f"10 runs x {len(paths)} files: endpoint JSON byte-identical = {identical}")


def test_c9_linear_time(capsys):
    item = random_corpus(1, seed=99)[0]
    speech, _ = synthesize_test_signal(item.__class__(**{**item.__dict__, "bursts": ()}))

    def recording(seconds):
        x = np.zeros(int(seconds * speech.sample_rate))
        n = min(x.size, len(speech))
        x[:n] = speech.samples[:n]
        return SignalBuffer(x, speech.sample_rate)

    short, long = recording(3.0), recording(6.0)
    detect_endpoints(short)  # warm kernel caches
    detect_endpoints(long)
    ratios, t_short = [], []
    for _ in range(5):
        t0 = time.perf_counter()
        detect_endpoints(short)
        t1 = time.perf_counter()
        detect_endpoints(long)
        t2 = time.perf_counter()
        t_short.append(t1 - t0)
        ratios.append((t2 - t1) / (t1 - t0))
    ratio = float(np.mean(ratios))
    ok = 1.6 <= ratio <= 2.6 and max(t_short) < 2.0
    report(capsys, 9, ok, f"time(6 s)/time(3 s) = {ratio:.2f} (in [1.6, 2.6]); "
                          f"3 s @ 48 kHz takes {np.mean(t_short):.3f}s (<2)")
