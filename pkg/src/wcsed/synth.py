"""Seeded synthetic recordings with exact speech boundaries.

An item is leading silence, one harmonic "utterance" with a fricative tail,
trailing silence, and a handful of non-speech bursts (breaths, clicks) placed
in the silences. Everything outside the declared spans is exactly zero, so
the ground-truth label is correct by construction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .evaluation import GroundTruthLabel
from .signal_io import SignalBuffer

BREATH_BAND = (1000.0, 4000.0)
CLICK_BAND = (2000.0, 6000.0)
FRICATIVE_BAND = (2000.0, 4000.0)


@dataclass(frozen=True)
class Burst:
    kind: str  # "breath" or "click"
    start: float  # seconds
    duration: float
    band: tuple
    amplitude: float = 0.05

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class ItemSpec:
    duration: float
    speech_start: float
    speech_end: float
    bursts: tuple = ()
    seed: int = 0
    sample_rate: int = 48000
    f0: float = 150.0
    n_harmonics: int = 6
    speech_amplitude: float = 0.5
    fricative_ms: float = 80.0
    group: str = ""
    name: str = ""

    def validate(self):
        nyq = self.sample_rate / 2
        if not 0 <= self.speech_start < self.speech_end <= self.duration:
            raise ValueError("speech span must lie inside the recording")
        if not 4 <= self.n_harmonics <= 8:
            raise ValueError("n_harmonics must be between 4 and 8")
        if not 120 <= self.f0 <= 300:
            raise ValueError("f0 must be between 120 and 300 Hz")
        if FRICATIVE_BAND[1] >= nyq or self.f0 * self.n_harmonics >= nyq:
            raise ValueError("speech band exceeds the Nyquist frequency")
        spans = [(self.speech_start, self.speech_end, "speech")]
        for b in self.bursts:
            if b.band[1] >= nyq:
                raise ValueError(f"{b.kind} band {b.band} exceeds the Nyquist frequency {nyq:g} Hz")
            if not 0 <= b.start < b.end <= self.duration:
                raise ValueError(f"{b.kind} burst at {b.start}s lies outside the recording")
            spans.append((b.start, b.end, b.kind))
        spans.sort()
        for (a0, a1, ka), (b0, b1, kb) in zip(spans, spans[1:]):
            if b0 < a1:
                raise ValueError(f"overlapping spans: {ka} [{a0}, {a1}] and {kb} [{b0}, {b1}]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bursts"] = [dict(asdict(b), band=list(b.band)) for b in self.bursts]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ItemSpec":
        d = dict(d)
        d["bursts"] = tuple(Burst(**dict(b, band=tuple(b["band"]))) for b in d.get("bursts", ()))
        return cls(**d)


def band_noise(n: int, band, sample_rate: int, rng) -> np.ndarray:
    """White noise restricted to ``band`` Hz by zeroing FFT bins outside it."""
    spec = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, 1.0 / sample_rate)
    spec[(f < band[0]) | (f > band[1])] = 0.0
    x = np.fft.irfft(spec, n)
    peak = np.max(np.abs(x))
    return x / peak if peak > 0 else x


def _ramp(n: int, ramp: int) -> np.ndarray:
    env = np.ones(n)
    ramp = min(ramp, n // 2)
    if ramp > 0:
        r = np.sin(0.5 * np.pi * (np.arange(ramp) + 0.5) / ramp) ** 2
        env[:ramp] = r
        env[n - ramp:] = r[::-1]
    return env


def _speech(spec: ItemSpec, n: int, rng) -> np.ndarray:
    fs = spec.sample_rate
    t = np.arange(n) / fs
    drift = 1.0 + 0.04 * np.sin(2 * np.pi * rng.uniform(2, 4) * t + rng.uniform(0, 2 * np.pi))
    phase = 2 * np.pi * np.cumsum(spec.f0 * drift) / fs
    voiced = np.zeros(n)
    for k in range(1, spec.n_harmonics + 1):
        voiced += np.sin(k * phase + rng.uniform(0, 2 * np.pi)) / k
    # syllable-rate amplitude modulation, never fully silent
    syll = 0.6 + 0.4 * np.sin(2 * np.pi * rng.uniform(3, 5) * t + rng.uniform(0, 2 * np.pi))
    voiced *= syll / np.max(np.abs(voiced))

    tail = min(int(round(spec.fricative_ms * fs / 1000)), n // 3)
    fric = np.zeros(n)
    if tail > 0:
        cross = np.linspace(0.0, 1.0, tail)
        fric[n - tail:] = 0.5 * band_noise(tail, FRICATIVE_BAND, fs, rng) * cross
        voiced[n - tail:] *= 1.0 - 0.7 * cross
    x = (voiced + fric) * _ramp(n, int(0.01 * fs))
    return spec.speech_amplitude * x / np.max(np.abs(x))


def _samples(t: float, fs: int) -> int:
    return int(round(t * fs))


def synthesize_test_signal(spec: ItemSpec, frame_shift_ms: float = 10.0):
    """Render ``spec`` into a :class:`SignalBuffer` and its frame label.

    Label frames are the speech span boundaries divided by the frame shift.
    The same spec (including its seed) always renders the same samples.
    """
    spec.validate()
    fs = spec.sample_rate
    rng = np.random.default_rng(spec.seed)
    x = np.zeros(_samples(spec.duration, fs))
    s0, s1 = _samples(spec.speech_start, fs), _samples(spec.speech_end, fs)
    x[s0:s1] = _speech(spec, s1 - s0, rng)
    for b in spec.bursts:
        b0, b1 = _samples(b.start, fs), _samples(b.end, fs)
        if b1 - b0 < 2:
            continue
        noise = band_noise(b1 - b0, b.band, fs, rng) * np.hanning(b1 - b0)
        peak = np.max(np.abs(noise))
        if peak > 0:
            x[b0:b1] += b.amplitude * noise / peak
    label = GroundTruthLabel(
        int(round(spec.speech_start * 1000 / frame_shift_ms)),
        int(round(spec.speech_end * 1000 / frame_shift_ms)),
        spec.group,
    )
    return SignalBuffer(np.clip(x, -1.0, 1.0), fs), label


def random_item(rng, sample_rate: int = 48000, name: str = "",
                start_range=(0.3, 2.5), duration_range=(0.5, 2.0),
                n_bursts_range=(1, 4), min_gap: float = 0.1) -> ItemSpec:
    """Draw one corpus item; bursts keep at least ``min_gap`` seconds from
    the speech and from each other."""
    speech_start = float(rng.uniform(*start_range))
    speech_end = speech_start + float(rng.uniform(*duration_range))
    n_bursts = int(rng.integers(n_bursts_range[0], n_bursts_range[1] + 1))
    f0 = float(rng.uniform(120, 300))

    before_cursor, after_cursor = speech_start, speech_end
    bursts = []
    for _ in range(n_bursts):
        if rng.random() < 0.5:
            kind, band = "breath", BREATH_BAND
            dur = float(rng.uniform(0.1, 0.4))
            amp = float(rng.uniform(0.02, 0.1))
        else:
            kind, band = "click", CLICK_BAND
            dur = float(rng.uniform(0.005, 0.03))
            amp = float(rng.uniform(0.05, 0.4))
        gap = min_gap + float(rng.uniform(0.0, 0.2))
        start = before_cursor - gap - dur
        if rng.random() < 0.5 and start >= 0.05:
            before_cursor = start
        else:
            start = after_cursor + gap
            after_cursor = start + dur
        bursts.append(Burst(kind, round(start, 6), round(dur, 6), band, round(amp, 6)))
    bursts.sort(key=lambda b: b.start)
    duration = after_cursor + float(rng.uniform(0.2, 0.6))
    return ItemSpec(
        duration=round(duration, 6),
        speech_start=round(speech_start, 6),
        speech_end=round(speech_end, 6),
        bursts=tuple(bursts),
        seed=int(rng.integers(0, 2 ** 31)),
        sample_rate=sample_rate,
        f0=round(f0, 3),
        n_harmonics=int(rng.integers(4, 9)),
        speech_amplitude=round(float(rng.uniform(0.2, 0.8)), 6),
        fricative_ms=round(float(rng.uniform(40, 120)), 3),
        group="FEMALE" if f0 >= 180 else "MALE",
        name=name,
    )


def random_corpus(n: int = 50, seed: int = 0, sample_rate: int = 48000, **kwargs) -> list:
    rng = np.random.default_rng(seed)
    return [random_item(rng, sample_rate, name=f"item{i:03d}", **kwargs) for i in range(n)]


def save_corpus_spec(path, items) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"items": [it.to_dict() for it in items]}, fh, indent=2, sort_keys=True)


def load_corpus_spec(path) -> list:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return [ItemSpec.from_dict(d) for d in doc["items"]]
