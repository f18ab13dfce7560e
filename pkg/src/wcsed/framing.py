"""Overlapping frames and per-frame histogram entropy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_BINS = 100


@dataclass(frozen=True)
class FrameSpec:
    sample_rate: int
    frame_length_ms: float = 20.0
    frame_shift_ms: float = 10.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not 0 < self.frame_shift_ms <= self.frame_length_ms:
            raise ValueError("need 0 < frame_shift_ms <= frame_length_ms")
        if self.frame_length_samples < 2:
            raise ValueError("frame must span at least 2 samples")
        if self.frame_shift_samples < 1:
            raise ValueError("frame shift must span at least 1 sample")

    @property
    def frame_length_samples(self) -> int:
        return int(round(self.frame_length_ms * self.sample_rate / 1000.0))

    @property
    def frame_shift_samples(self) -> int:
        return int(round(self.frame_shift_ms * self.sample_rate / 1000.0))

    def frame_count(self, length: int) -> int:
        fl, fsh = self.frame_length_samples, self.frame_shift_samples
        if length < fl:
            raise ValueError(f"sequence of {length} samples is shorter than one frame ({fl})")
        return (length - fl) // fsh + 1


@dataclass(frozen=True)
class EntropyVector:
    values: np.ndarray
    spec: FrameSpec
    bins: int = DEFAULT_BINS

    def __len__(self):
        return self.values.size


def frame_indices(length: int, spec: FrameSpec) -> list:
    """``(start, end)`` sample pairs, ``end`` inclusive; the partial tail is dropped."""
    n = spec.frame_count(length)
    fl, fsh = spec.frame_length_samples, spec.frame_shift_samples
    return [(i * fsh, i * fsh + fl - 1) for i in range(n)]


def _bin_index(frames: np.ndarray, bins: int):
    # frames: (n_frames, frame_len). Uniform bins over each row's own range;
    # the row maximum lands in the last bin.
    lo = frames.min(axis=1, keepdims=True)
    hi = frames.max(axis=1, keepdims=True)
    span = hi - lo
    flat = (span == 0).reshape(-1)
    safe = np.where(span == 0, 1.0, span)
    idx = np.floor((frames - lo) / safe * bins).astype(np.int64)
    np.clip(idx, 0, bins - 1, out=idx)
    idx[flat] = 0
    return idx


def histogram_probabilities(frame, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Relative frequencies over ``bins`` uniform bins spanning the frame's range.

    A constant frame has no range and collapses to the single outcome ``[1.0]``.
    """
    x = np.asarray(frame, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ValueError("cannot estimate probabilities of an empty frame")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if x.max() == x.min():
        return np.array([1.0])
    idx = _bin_index(x[None, :], bins)[0]
    return np.bincount(idx, minlength=bins) / x.size


def _entropy(p):
    # sorted so that mirrored histograms (negative scaling) sum identically
    p = np.sort(p[p > 0])
    return float(max(0.0, -np.sum(p * np.log10(p))))


def frame_entropy(frame, bins: int = DEFAULT_BINS) -> float:
    """``-sum p log10 p`` of the frame's amplitude histogram (``0 log 0 = 0``)."""
    return _entropy(histogram_probabilities(frame, bins))


def entropy_vector(seq, spec: FrameSpec, bins: int = DEFAULT_BINS) -> EntropyVector:
    """Frame entropy for every complete frame of ``seq``.

    Vectorised over frames; agrees with calling :func:`frame_entropy` on each
    frame from :func:`frame_indices`.
    """
    x = np.asarray(seq, dtype=np.float64).reshape(-1)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    n = spec.frame_count(x.size)
    fl, fsh = spec.frame_length_samples, spec.frame_shift_samples
    frames = np.lib.stride_tricks.sliding_window_view(x, fl)[::fsh][:n]
    idx = _bin_index(frames, bins) + (np.arange(n) * bins)[:, None]
    counts = np.bincount(idx.ravel(), minlength=n * bins).reshape(n, bins)
    p = np.sort(counts, axis=1) / fl
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log10(np.where(p > 0, p, 1.0)), 0.0)
    values = np.maximum(0.0, -terms.sum(axis=1))
    return EntropyVector(values, spec, bins)
