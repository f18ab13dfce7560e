"""Linear convolution: exact direct sums, an FFT path, and the first
difference applied to wavelet coefficients."""
from __future__ import annotations

import numpy as np
import scipy.fft

# Above this many multiply-adds convolve_same switches to the FFT path.
FFT_THRESHOLD = 2 ** 18


def _operands(signal, kernel):
    x = np.asarray(signal, dtype=np.float64).reshape(-1)
    k = np.asarray(kernel, dtype=np.float64).reshape(-1)
    if x.size == 0 or k.size == 0:
        raise ValueError("convolution operands must be non-empty")
    return x, k


def convolve_direct(signal, kernel) -> np.ndarray:
    """Full linear convolution ``y[n] = sum_k x[k] h[n-k]`` by direct summation.

    Accumulates one shifted, weighted copy of the longer operand per sample of
    the shorter one, so the cost is ``len(x) * len(h)`` multiply-adds.
    """
    x, k = _operands(signal, kernel)
    if x.size < k.size:
        x, k = k, x
    out = np.zeros(x.size + k.size - 1)
    for i, w in enumerate(k):
        if w != 0.0:
            out[i:i + x.size] += w * x
    return out


def convolve_fft(signal, kernel) -> np.ndarray:
    """Full linear convolution via zero-padded real FFTs."""
    x, k = _operands(signal, kernel)
    n = x.size + k.size - 1
    nfft = scipy.fft.next_fast_len(n, real=True)
    spec = scipy.fft.rfft(x, nfft) * scipy.fft.rfft(k, nfft)
    return scipy.fft.irfft(spec, nfft)[:n]


def convolve_same(signal, kernel, threshold: int = FFT_THRESHOLD) -> np.ndarray:
    """Central ``len(signal)`` samples of the full convolution (zero padded).

    Output index ``n`` lines up with input sample ``n`` once the kernel is
    centred, so coefficient frames map one-to-one onto signal time.
    """
    x, k = _operands(signal, kernel)
    if k.size > x.size:
        raise ValueError(f"kernel ({k.size} taps) is longer than the signal ({x.size} samples)")
    if x.size * k.size > threshold:
        full = convolve_fft(x, k)
    else:
        full = convolve_direct(x, k)
    start = (k.size - 1) // 2
    return full[start:start + x.size]


def first_difference(seq) -> np.ndarray:
    """``out[i] = seq[i+1] - seq[i]``."""
    x = np.asarray(seq, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("first difference needs a 1-D sequence of length >= 2")
    return np.diff(x)
