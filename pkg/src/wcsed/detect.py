"""Wavelet-convolution speech endpoint detection.

The recording is convolved with DB8 kernels at two banks of scales. Each
bank's coefficient magnitudes are pooled into one sequence, framed, and
turned into an entropy curve: the low-frequency curve locates the voiced
core of the utterance and the high-frequency curve extends it outward to
unvoiced onsets and offsets, stopping at silent gaps so that breaths and
clicks separated from the speech are left out.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict, replace
from typing import Optional, Sequence

import numpy as np

from .convolution import FFT_THRESHOLD, convolve_same, first_difference
from .framing import DEFAULT_BINS, EntropyVector, FrameSpec, entropy_vector
from .signal_io import SignalBuffer, rms_loudness
from .wavelet import (DEFAULT_LEVELS, HF_BAND, LF_BAND, bank_from_bands, cached_kernel,
                      default_scale_bank)

# Coefficients below this fraction of the peak are FFT round-off, not signal.
ROUNDOFF_FLOOR = 1e-9


class DetectionError(ValueError):
    pass


class NoContrastError(DetectionError):
    """Entropy is flat: there is no speech/silence contrast to threshold."""


class NoSpeechError(DetectionError):
    """No frame clears the core threshold."""


@dataclass(frozen=True)
class DetectorConfig:
    """Every tunable of the detector. ``None`` scale lists select the default bank."""

    frame_length_ms: float = 20.0
    frame_shift_ms: float = 10.0
    bins: int = DEFAULT_BINS
    gamma: float = 0.8
    gap_frames: int = 3
    merge_ms: float = 60.0
    loudness_threshold: float = 0.1
    hf_scales: Optional[tuple] = None
    lf_scales: Optional[tuple] = None
    hf_band: Optional[tuple] = None
    lf_band: Optional[tuple] = None
    levels: int = DEFAULT_LEVELS
    mode: str = "prose"
    fft_threshold: int = FFT_THRESHOLD

    def __post_init__(self):
        if self.mode not in ("prose", "pseudocode"):
            raise ValueError(f"mode must be 'prose' or 'pseudocode', got {self.mode!r}")
        if self.gap_frames < 1:
            raise ValueError("gap_frames must be >= 1")
        if not 0 < self.gamma:
            raise ValueError("gamma must be positive")
        if self.merge_ms < 0 or self.loudness_threshold < 0:
            raise ValueError("merge_ms and loudness_threshold must be non-negative")
        for name in ("hf_scales", "lf_scales"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(sorted(float(s) for s in v)))
        for name in ("hf_band", "lf_band"):
            v = getattr(self, name)
            if v is not None:
                lo, hi = (float(f) for f in v)
                if not 0 < lo < hi:
                    raise ValueError(f"{name} must be (low, high) Hz with 0 < low < high")
                object.__setattr__(self, name, (lo, hi))

    def frame_spec(self, sample_rate: int) -> FrameSpec:
        return FrameSpec(sample_rate, self.frame_length_ms, self.frame_shift_ms)

    def scales(self, sample_rate: int):
        """Explicit scale lists win, then frequency bands, then the default bank."""
        if self.hf_scales is not None and self.lf_scales is not None:
            return self.hf_scales, self.lf_scales
        if self.hf_band is not None or self.lf_band is not None:
            bank = bank_from_bands(sample_rate, self.hf_band or HF_BAND, self.lf_band or LF_BAND)
        else:
            bank = default_scale_bank(sample_rate)
        return (self.hf_scales or bank.hf_scales), (self.lf_scales or bank.lf_scales)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("hf_scales", "lf_scales", "hf_band", "lf_band"):
            if d[name] is not None:
                d[name] = list(d[name])
        return d


@dataclass(frozen=True)
class CoefficientMatrix:
    rows: np.ndarray
    scale_labels: tuple

    @property
    def row_len(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class ThresholdPair:
    core_threshold: float
    edge_threshold: float


@dataclass(frozen=True)
class EndpointResult:
    start_frame: int
    end_frame: int
    start_sample: int
    end_sample: int
    spec: FrameSpec

    def to_dict(self) -> dict:
        return {
            "start_frame": self.start_frame,
            "end_frame": self.end_frame,
            "start_sample": self.start_sample,
            "end_sample": self.end_sample,
            "start_time": self.start_sample / self.spec.sample_rate,
            "end_time": (self.end_sample + 1) / self.spec.sample_rate,
        }


@dataclass(frozen=True)
class Detection:
    """Endpoints together with the intermediate curves that produced them."""

    endpoints: EndpointResult
    thresholds: ThresholdPair
    ce_l: EntropyVector
    ce_h: EntropyVector
    core: tuple
    loudness: float
    config: DetectorConfig = field(repr=False)

    def active(self) -> np.ndarray:
        """Per-frame flag: inside the detected segment."""
        flags = np.zeros(len(self.ce_l), dtype=bool)
        flags[self.endpoints.start_frame:self.endpoints.end_frame + 1] = True
        return flags


def wave_conv(signal, scales: Sequence[float], levels: int = DEFAULT_LEVELS,
              fft_threshold: int = FFT_THRESHOLD) -> CoefficientMatrix:
    """Convolve with the DB8 kernel at every scale and take the first difference.

    Returns an ``m x (n-1)`` matrix with one row per scale, in the given order.
    """
    x = signal.samples if isinstance(signal, SignalBuffer) else np.asarray(signal, dtype=np.float64)
    scales = tuple(float(s) for s in scales)
    if not scales:
        raise ValueError("at least one scale is required")
    rows = np.empty((len(scales), x.size - 1))
    for i, s in enumerate(scales):
        kernel = cached_kernel(s, levels)
        rows[i] = first_difference(convolve_same(x, kernel.taps, fft_threshold))
    return CoefficientMatrix(rows, scales)


def combine_coefficients(matrix, loudness: float, loudness_threshold: float = 0.1) -> np.ndarray:
    """Pool ``|coefficients|`` across scales: averaged for loud recordings
    (``loudness > loudness_threshold``), summed otherwise."""
    rows = matrix.rows if isinstance(matrix, CoefficientMatrix) else np.asarray(matrix, dtype=np.float64)
    if rows.ndim != 2 or rows.size == 0:
        raise ValueError("coefficient matrix is empty")
    mags = np.abs(rows)
    if loudness > loudness_threshold:
        return mags.mean(axis=0)
    return mags.sum(axis=0)


def otsu_threshold(values) -> float:
    """Two-class Otsu split of a 1-D sample, exhaustive over all cut points.

    Every boundary between consecutive distinct sorted values is a candidate;
    the one maximising the between-class variance ``w0 w1 (mu0 - mu1)**2``
    wins and the threshold is placed midway across that gap.
    """
    v = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    if v.size < 2 or v[0] == v[-1]:
        raise NoContrastError("entropy vector is constant: no speech/silence contrast")
    n = v.size
    csum = np.cumsum(v)
    k = np.arange(1, n)  # size of the lower class
    cut = np.flatnonzero(v[1:] > v[:-1])  # lower class = v[:i+1]
    k = k[cut]
    mu0 = csum[cut] / k
    mu1 = (csum[-1] - csum[cut]) / (n - k)
    between = (k / n) * (1 - k / n) * (mu0 - mu1) ** 2
    best = cut[int(np.argmax(between))]
    return float(0.5 * (v[best] + v[best + 1]))


def compute_thresholds(ce, gamma: float = 0.8) -> ThresholdPair:
    values = ce.values if isinstance(ce, EntropyVector) else np.asarray(ce, dtype=np.float64)
    core = otsu_threshold(values)
    return ThresholdPair(core, gamma * core)


def _runs(mask):
    padded = np.concatenate(([False], np.asarray(mask, dtype=bool), [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def detect_core_region(ce_l, core_threshold: float, merge_ms: float = 60.0,
                       frame_shift_ms: Optional[float] = None) -> tuple:
    """Longest run of frames with ``ce_l >= core_threshold``.

    Runs whose separating gap is shorter than ``merge_ms`` are first joined,
    so brief pauses between words stay inside the core. Ties go to the
    earliest run.
    """
    if isinstance(ce_l, EntropyVector):
        values = ce_l.values
        shift = ce_l.spec.frame_shift_ms if frame_shift_ms is None else frame_shift_ms
    else:
        values = np.asarray(ce_l, dtype=np.float64)
        shift = 10.0 if frame_shift_ms is None else frame_shift_ms
    runs = _runs(values >= core_threshold)
    if not runs:
        raise NoSpeechError("no speech detected: no frame reaches the core threshold")
    merged = [runs[0]]
    for a, b in runs[1:]:
        gap = a - merged[-1][1] - 1
        if gap * shift < merge_ms:
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return max(merged, key=lambda r: (r[1] - r[0], -r[0]))


def include_edges(ce_h, anchor: int, direction: str, edge_threshold: float,
                  gap_frames: int = 3) -> int:
    """Stretch a boundary outward along ``ce_h``.

    Walks from ``anchor`` towards the start (``"backward"``) or the end
    (``"forward"``) of the vector. Frames at or above ``edge_threshold``
    qualify; runs of fewer than ``gap_frames`` failing frames are bridged,
    while a run of ``gap_frames`` or more ends the walk. Returns the last
    qualifying frame reached, or ``anchor`` itself if nothing qualifies.
    """
    values = ce_h.values if isinstance(ce_h, EntropyVector) else np.asarray(ce_h, dtype=np.float64)
    n = values.size
    if not 0 <= anchor < n:
        raise IndexError(f"anchor {anchor} outside [0, {n})")
    if direction in ("backward", "back"):
        step = -1
    elif direction in ("forward", "front"):
        step = 1
    else:
        raise ValueError(f"direction must be 'backward' or 'forward', got {direction!r}")
    best = anchor
    misses = 0
    i = anchor + step
    while 0 <= i < n:
        if values[i] >= edge_threshold:
            best = i
            misses = 0
        else:
            misses += 1
            if misses >= gap_frames:
                break
        i += step
    return best


def _endpoint_result(start_frame, end_frame, spec: FrameSpec, n_samples: int) -> EndpointResult:
    fsh, fl = spec.frame_shift_samples, spec.frame_length_samples
    start_sample = start_frame * fsh
    end_sample = min(end_frame * fsh + fl - 1, n_samples - 1)
    return EndpointResult(int(start_frame), int(end_frame), int(start_sample), int(end_sample), spec)


def _pooled_entropy(signal, scales, loudness, config, spec):
    matrix = wave_conv(signal, scales, config.levels, config.fft_threshold)
    pooled = combine_coefficients(matrix, loudness, config.loudness_threshold)
    peak = pooled.max()
    if peak > 0:
        pooled = np.where(pooled < ROUNDOFF_FLOOR * peak, 0.0, pooled)
    return entropy_vector(pooled, spec, config.bins)


def analyze(signal: SignalBuffer, config: Optional[DetectorConfig] = None) -> Detection:
    """Run the full detector and keep the intermediate entropy curves."""
    config = config or DetectorConfig()
    spec = config.frame_spec(signal.sample_rate)
    if len(signal) - 1 < spec.frame_length_samples + spec.frame_shift_samples:
        raise DetectionError(f"signal of {len(signal)} samples spans fewer than 2 frames")
    hf, lf = config.scales(signal.sample_rate)
    loudness = rms_loudness(signal)

    if config.mode == "pseudocode":
        # one entropy curve over all scales; lower bar finds the core,
        # upper bar stretches the start, lower bar stretches the end
        ce = _pooled_entropy(signal, tuple(hf) + tuple(lf), loudness, config, spec)
        pair = compute_thresholds(ce, config.gamma)
        upper, lower = pair.core_threshold, pair.edge_threshold
        core = detect_core_region(ce, lower, config.merge_ms)
        start = include_edges(ce, core[0], "backward", upper, config.gap_frames)
        end = include_edges(ce, core[1], "forward", lower, config.gap_frames)
        ce_l = ce_h = ce
        thresholds = pair
    else:
        ce_h = _pooled_entropy(signal, hf, loudness, config, spec)
        ce_l = _pooled_entropy(signal, lf, loudness, config, spec)
        core_th = compute_thresholds(ce_l, config.gamma).core_threshold
        edge_th = compute_thresholds(ce_h, config.gamma).edge_threshold
        core = detect_core_region(ce_l, core_th, config.merge_ms)
        start = include_edges(ce_h, core[0], "backward", edge_th, config.gap_frames)
        end = include_edges(ce_h, core[1], "forward", edge_th, config.gap_frames)
        thresholds = ThresholdPair(core_th, edge_th)

    endpoints = _endpoint_result(start, end, spec, len(signal))
    return Detection(endpoints, thresholds, ce_l, ce_h, tuple(core), loudness, config)


def detect_endpoints(signal: SignalBuffer, config: Optional[DetectorConfig] = None) -> EndpointResult:
    return analyze(signal, config).endpoints


def extract_segment(signal: SignalBuffer, result: EndpointResult) -> SignalBuffer:
    """Samples ``start_sample`` through ``end_sample`` inclusive."""
    if not 0 <= result.start_sample <= result.end_sample < len(signal):
        raise ValueError(f"endpoints [{result.start_sample}, {result.end_sample}] "
                         f"outside a signal of {len(signal)} samples")
    return SignalBuffer(signal.samples[result.start_sample:result.end_sample + 1], signal.sample_rate)
