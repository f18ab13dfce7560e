"""Reading, writing and normalizing digitized recordings.

Only uncompressed RIFF/WAVE is handled: integer PCM (8/16/24/32 bit) and
IEEE float (32/64 bit), including the WAVE_FORMAT_EXTENSIBLE wrapper.
Amplitudes are always returned as float64 in [-1, 1].
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    """The file is not a well-formed RIFF/WAVE container."""


class UnsupportedCodecError(WavFormatError):
    """The WAVE file uses a codec other than PCM or IEEE float."""


@dataclass(frozen=True)
class SignalBuffer:
    """Mono amplitude sequence in [-1, 1] plus its sample rate in Hz.

    The sample array is copied on construction and marked read-only, so a
    buffer can be shared freely between threads.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64).reshape(-1)
        if x.size < 1:
            raise ValueError("signal must contain at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("signal contains non-finite samples")
        if np.max(np.abs(x)) > 1.0:
            raise ValueError("amplitudes must lie in [-1, 1]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def to_mono(frames, sample_rate: int = 1) -> SignalBuffer:
    """Average channels into a single mono buffer.

    Parameters
    ----------
    frames : array_like
        Either a 1-D mono sequence, or a 2-D array of shape
        ``(n_frames, n_channels)`` holding one amplitude tuple per frame.
    sample_rate : int
        Sample rate attached to the result.
    """
    if isinstance(frames, np.ndarray):
        arr = frames.astype(np.float64)
    else:
        rows = list(frames)
        if rows and np.ndim(rows[0]) == 1:
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise ValueError("ragged channel lengths: every frame needs the same channel count")
        arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim == 1:
        return SignalBuffer(arr, sample_rate)
    if arr.ndim != 2:
        raise ValueError("frames must be 1-D (mono) or 2-D (frames x channels)")
    if arr.shape[1] == 0:
        raise ValueError("zero channels")
    return SignalBuffer(arr.mean(axis=1), sample_rate)


def rms_loudness(signal: SignalBuffer | np.ndarray) -> float:
    """Root-mean-square level of the whole recording."""
    x = signal.samples if isinstance(signal, SignalBuffer) else np.asarray(signal, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot measure loudness of an empty signal")
    return float(np.sqrt(np.mean(np.square(x))))


def _iter_chunks(data: bytes, path):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8:pos + 8 + size]
        yield cid, size, body
        pos += 8 + size + (size & 1)


def _decode(body: bytes, fmt_tag: int, bits: int, channels: int) -> np.ndarray:
    if fmt_tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits not in (32, 64):
            raise UnsupportedCodecError(f"unsupported float width: {bits} bits")
        x = np.frombuffer(body, dtype="<f4" if bits == 32 else "<f8").astype(np.float64)
        x = np.clip(x, -1.0, 1.0)
    elif bits == 8:
        # 8-bit PCM is unsigned with a 128 offset
        x = (np.frombuffer(body, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif bits == 16:
        x = np.frombuffer(body, dtype="<i2").astype(np.float64) / 32768.0
    elif bits == 24:
        raw = np.frombuffer(body, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        v = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        v = np.where(v >= 1 << 23, v - (1 << 24), v)
        x = v.astype(np.float64) / float(1 << 23)
    elif bits == 32:
        x = np.frombuffer(body, dtype="<i4").astype(np.float64) / float(1 << 31)
    else:
        raise UnsupportedCodecError(f"unsupported PCM width: {bits} bits")
    return x.reshape(-1, channels)


def load_wav(path) -> SignalBuffer:
    """Load a PCM or IEEE-float WAVE file as a mono :class:`SignalBuffer`.

    Integer samples are divided by the format's full-scale value (so the
    16-bit value -32768 maps to exactly -1.0); multichannel audio is averaged.

    Raises
    ------
    FileNotFoundError
        The path does not exist.
    WavFormatError
        Broken RIFF header, missing ``fmt``/``data`` chunk, or a truncated
        data chunk ("malformed data chunk").
    UnsupportedCodecError
        Compressed or otherwise non-PCM, non-float encodings.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such WAVE file: {path}")
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"malformed RIFF header in {path}")

    fmt = None
    body = None
    for cid, size, chunk in _iter_chunks(data, path):
        if cid == b"fmt ":
            if len(chunk) < 16:
                raise WavFormatError(f"malformed fmt chunk in {path}")
            fmt = struct.unpack_from("<HHIIHH", chunk, 0)
            if fmt[0] == WAVE_FORMAT_EXTENSIBLE:
                if len(chunk) < 26:
                    raise WavFormatError(f"malformed fmt chunk in {path}")
                sub = struct.unpack_from("<H", chunk, 24)[0]
                fmt = (sub,) + fmt[1:]
        elif cid == b"data":
            if len(chunk) < size:
                raise WavFormatError(f"malformed data chunk in {path}: "
                                     f"header declares {size} bytes, file holds {len(chunk)}")
            body = chunk
            break
    if fmt is None:
        raise WavFormatError(f"missing fmt chunk in {path}")
    if body is None:
        raise WavFormatError(f"missing data chunk in {path}")

    fmt_tag, channels, rate, _, block_align, bits = fmt
    if fmt_tag not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedCodecError(f"unsupported codec 0x{fmt_tag:04x} in {path} (only PCM and IEEE float)")
    if channels < 1 or rate < 1 or bits < 8 or bits % 8:
        raise WavFormatError(f"malformed fmt chunk in {path}")
    frame_bytes = channels * bits // 8
    if len(body) % frame_bytes:
        raise WavFormatError(f"malformed data chunk in {path}: partial trailing frame")
    if not body:
        raise WavFormatError(f"malformed data chunk in {path}: no samples")
    frames = _decode(body, fmt_tag, bits, channels)
    return to_mono(frames, rate)


def save_wav(path, signal: SignalBuffer, bits: int = 16) -> None:
    """Write ``signal`` as little-endian PCM16 (default) or float32 WAVE."""
    x = signal.samples
    if bits == 16:
        q = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
        fmt_tag = WAVE_FORMAT_PCM
    elif bits == 32:
        q = x.astype("<f4")
        fmt_tag = WAVE_FORMAT_IEEE_FLOAT
    else:
        raise ValueError("bits must be 16 (PCM) or 32 (float)")
    payload = q.tobytes()
    block = bits // 8
    header = struct.pack("<4sI4s", b"RIFF", 36 + len(payload) + (len(payload) & 1), b"WAVE")
    fmt = struct.pack("<4sIHHIIHH", b"fmt ", 16, fmt_tag, 1, signal.sample_rate,
                      signal.sample_rate * block, block, bits)
    with open(path, "wb") as fh:
        fh.write(header + fmt + struct.pack("<4sI", b"data", len(payload)) + payload)
        if len(payload) & 1:
            fh.write(b"\x00")
