"""Daubechies-8 mother wavelet sampling, dilated kernels and scale banks.

Scales are expressed in samples per unit of wavelet support, so a kernel at
scale ``s`` spans ``15 * s`` samples and its pseudo-frequency is
``Fc * sample_rate / s`` with ``Fc`` the wavelet's centre frequency in
cycles per unit.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Daubechies scaling (reconstruction low-pass) filter with 8 vanishing moments.
DB8_FILTER = np.array([
    0.05441584224308161,
    0.3128715909144659,
    0.6756307362980128,
    0.5853546836548691,
    -0.015829105256023893,
    -0.2840155429624281,
    0.00047248457399797254,
    0.128747426620186,
    -0.01736930100202211,
    -0.04408825393106472,
    0.013981027917015516,
    0.008746094047015655,
    -0.004870352993451574,
    -0.0003917403729959771,
    0.0006754494059985568,
    -0.00011747678400228192,
])

DEFAULT_LEVELS = 10
SUPPORT = len(DB8_FILTER) - 1

HF_BAND = (1000.0, 3200.0)
LF_BAND = (300.0, 1000.0)
N_HF = 12
N_LF = 6


@dataclass(frozen=True)
class MotherWavelet:
    """Dense samples of psi on ``[0, support]`` at ``2**levels`` points per unit."""

    taps: np.ndarray
    levels: int
    support: int = SUPPORT

    @property
    def grid(self):
        return np.arange(self.taps.size) / float(2 ** self.levels)


@dataclass(frozen=True)
class WaveletKernel:
    scale: float
    taps: np.ndarray

    @property
    def support_len(self) -> int:
        return self.taps.size


@dataclass(frozen=True)
class ScaleBank:
    hf_scales: tuple
    lf_scales: tuple

    def __post_init__(self):
        hf = tuple(float(s) for s in self.hf_scales)
        lf = tuple(float(s) for s in self.lf_scales)
        if not hf or not lf:
            raise ValueError("both scale lists must be non-empty")
        if min(hf + lf) <= 0:
            raise ValueError("scales must be positive")
        if list(hf) != sorted(hf) or list(lf) != sorted(lf):
            raise ValueError("scales must be ascending")
        object.__setattr__(self, "hf_scales", hf)
        object.__setattr__(self, "lf_scales", lf)


def wavelet_filter(lowpass=DB8_FILTER):
    """Quadrature-mirror high-pass filter ``g[k] = (-1)**k h[N-1-k]``."""
    h = np.asarray(lowpass, dtype=np.float64)
    return h[::-1] * (-1.0) ** np.arange(h.size)


def _upsample(x):
    out = np.zeros(2 * x.size - 1)
    out[::2] = x
    return out


def sample_mother_wavelet(levels: int = DEFAULT_LEVELS) -> np.ndarray:
    """Sample the DB8 wavelet function with the cascade algorithm.

    ``levels - 1`` refinements with the low-pass filter give the scaling
    function on a grid of ``2**(levels-1)`` points per unit; the two-scale
    relation ``psi(t) = sqrt(2) sum_k g[k] phi(2t - k)`` then places psi on
    the doubled grid, which is equivalent to filtering with ``g`` dilated by
    ``2**(levels-1)``. The result is shifted to exact zero mean and scaled
    to unit L2 norm.
    """
    if int(levels) != levels or levels < 4:
        raise ValueError(f"levels must be an integer >= 4 to resolve the 16-tap filter, got {levels!r}")
    h = DB8_FILTER * np.sqrt(2.0)
    g = wavelet_filter() * np.sqrt(2.0)
    phi = np.array([1.0])
    for _ in range(levels - 1):
        phi = np.convolve(_upsample(phi), h)
    g_dilated = np.zeros((g.size - 1) * 2 ** (levels - 1) + 1)
    g_dilated[::2 ** (levels - 1)] = g
    psi = np.convolve(phi, g_dilated)
    psi = psi - psi.mean()
    return psi / np.linalg.norm(psi)


@lru_cache(maxsize=8)
def mother_wavelet(levels: int = DEFAULT_LEVELS) -> MotherWavelet:
    taps = sample_mother_wavelet(levels)
    taps.flags.writeable = False
    return MotherWavelet(taps, levels)


def kernel_at_scale(base: MotherWavelet, scale: float, sample_rate: int) -> WaveletKernel:
    """Dilate the sampled mother wavelet to ``scale`` samples per unit.

    The dense cascade samples are linearly interpolated onto the integer
    sample grid, re-centred to zero mean, weighted by ``1/sqrt(scale)`` and
    finally renormalized to unit energy, which makes every kernel in a bank
    directly comparable.
    """
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    if not sample_rate > 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate!r}")
    n = int(np.floor(base.support * scale)) + 1
    if n < 2:
        raise ValueError(f"scale {scale} yields fewer than 2 taps")
    t = np.arange(n) / scale
    taps = np.interp(t, base.grid, base.taps, right=0.0)
    taps -= taps.mean()
    taps /= np.sqrt(scale)
    norm = np.linalg.norm(taps)
    if norm == 0:
        raise ValueError(f"scale {scale} is too small to resolve the wavelet")
    taps = taps / norm
    taps.flags.writeable = False
    return WaveletKernel(float(scale), taps)


@lru_cache(maxsize=256)
def cached_kernel(scale: float, levels: int = DEFAULT_LEVELS) -> WaveletKernel:
    return kernel_at_scale(mother_wavelet(levels), scale, 1)


@lru_cache(maxsize=8)
def center_frequency(levels: int = DEFAULT_LEVELS) -> float:
    """Centre frequency of the sampled wavelet, in cycles per unit support.

    The dominant bin of the FFT taken over exactly the wavelet's support, so
    bin ``k`` corresponds to ``k / support`` cycles per unit. For DB8 this is
    bin 10, i.e. 2/3.
    """
    base = mother_wavelet(levels)
    n = base.support * 2 ** levels
    spec = np.abs(np.fft.rfft(base.taps[:n]))
    k = int(np.argmax(spec[1:])) + 1
    return k / base.support


def scale_to_frequency(scale, sample_rate, levels: int = DEFAULT_LEVELS):
    """Pseudo-frequency in Hz highlighted by a kernel at ``scale``."""
    scale = np.asarray(scale, dtype=np.float64)
    if np.any(scale <= 0):
        raise ValueError("scale must be positive")
    f = center_frequency(levels) * sample_rate / scale
    return float(f) if f.ndim == 0 else f


def frequency_to_scale(freq, sample_rate, levels: int = DEFAULT_LEVELS):
    freq = np.asarray(freq, dtype=np.float64)
    s = center_frequency(levels) * sample_rate / freq
    return float(s) if s.ndim == 0 else s


def scales_for_band(lo: float, hi: float, count: int, sample_rate: int,
                    include_lo: bool = True) -> tuple:
    """``count`` log-spaced scales whose pseudo-frequencies cover ``[lo, hi]``.

    With ``include_lo=False`` the band is half-open, ``(lo, hi]`` becomes
    ``[lo, hi)`` in scale order, i.e. the low-frequency end is excluded.
    """
    if include_lo:
        freqs = np.geomspace(lo, hi, count)
    else:
        freqs = np.geomspace(lo, hi, count + 1)[:-1]
    return tuple(sorted(float(s) for s in frequency_to_scale(freqs, sample_rate)))


def default_scale_bank(sample_rate: int) -> ScaleBank:
    """Twelve high-frequency scales (1000-3200 Hz) and six low-frequency
    scales (300 Hz up to, but excluding, 1000 Hz)."""
    if sample_rate < 8000:
        raise ValueError(f"sample rate {sample_rate} Hz is too low: the Nyquist limit "
                         f"{sample_rate / 2:g} Hz cannot represent the 300-3000 Hz speech band")
    hf = scales_for_band(*HF_BAND, N_HF, sample_rate)
    lf = scales_for_band(*LF_BAND, N_LF, sample_rate, include_lo=False)
    return ScaleBank(hf, lf)


def bank_from_bands(sample_rate, hf_band=HF_BAND, lf_band=LF_BAND, n_hf=N_HF, n_lf=N_LF) -> ScaleBank:
    if max(hf_band[1], lf_band[1]) >= sample_rate / 2:
        raise ValueError("analysis band exceeds the Nyquist frequency")
    return ScaleBank(scales_for_band(hf_band[0], hf_band[1], n_hf, sample_rate),
                     scales_for_band(lf_band[0], lf_band[1], n_lf, sample_rate, include_lo=False))
