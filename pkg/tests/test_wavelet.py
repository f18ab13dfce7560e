from math import comb

import numpy as np
import pytest

from wcsed.wavelet import (DB8_FILTER, ScaleBank, center_frequency, default_scale_bank,
                           kernel_at_scale, mother_wavelet, sample_mother_wavelet,
                           scale_to_frequency, wavelet_filter)


def daubechies_by_factorization(p):
    """Minimum-phase Daubechies low-pass filter from the roots of the
    half-band polynomial sum_k C(p-1+k, k) y**k."""
    poly = [comb(p - 1 + k, k) for k in range(p)][::-1]
    zeros = []
    for y in np.roots(poly):
        r = np.roots([1, -(2 - 4 * y), 1])
        zeros.append(r[np.argmin(np.abs(r))])
    h = np.array([1.0])
    for _ in range(p):
        h = np.convolve(h, [1.0, 1.0])
    h = np.convolve(h, np.real(np.poly(zeros)))
    return h / h.sum() * np.sqrt(2)


def test_filter_matches_spectral_factorization():
    np.testing.assert_allclose(DB8_FILTER, daubechies_by_factorization(8), atol=1e-10)


def test_filter_identities():
    assert DB8_FILTER.size == 16
    assert DB8_FILTER.sum() == pytest.approx(np.sqrt(2), abs=1e-10)
    assert np.sum(DB8_FILTER ** 2) == pytest.approx(1.0, abs=1e-10)
    for m in range(1, 8):
        assert abs(np.dot(DB8_FILTER[:-2 * m], DB8_FILTER[2 * m:])) < 1e-10
    g = wavelet_filter()
    k = np.arange(16) / 15.0
    for p in range(8):
        assert abs(np.sum(g * k ** p)) < 1e-10


def test_sampled_wavelet_shape():
    psi = sample_mother_wavelet(10)
    assert abs(psi.size - 15 * 2 ** 10) <= 16
    assert abs(psi.mean()) <= 1e-6 * np.max(np.abs(psi))
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_cascade_converges():
    # coarser sampling of the same function: compare on the shared dyadic grid
    fine = sample_mother_wavelet(10)
    coarse = sample_mother_wavelet(8)
    sub = fine[::4][:coarse.size]
    sub = sub / np.linalg.norm(sub)
    c = coarse / np.linalg.norm(coarse)
    assert np.max(np.abs(sub - c[:sub.size])) < 0.05 * np.max(np.abs(c))


@pytest.mark.parametrize("levels", [0, 3, 2.5])
def test_levels_too_small(levels):
    with pytest.raises(ValueError):
        sample_mother_wavelet(levels)


@pytest.mark.parametrize("scale", [1.0, 3.7, 10.0, 23.0, 50.0, 100.0, 250.0])
def test_kernel_admissible(scale):
    k = kernel_at_scale(mother_wavelet(), scale, 48000)
    assert abs(k.taps.mean()) <= 1e-6 * np.max(np.abs(k.taps))
    assert np.linalg.norm(k.taps) == pytest.approx(1.0, abs=1e-9)


def test_kernel_dilation_is_linear():
    base = mother_wavelet()
    for s in (7.0, 13.3, 40.0):
        a = kernel_at_scale(base, s, 48000).support_len
        b = kernel_at_scale(base, 2 * s, 48000).support_len
        assert abs(b - 2 * a) <= 1


def test_kernel_period_at_scale_100():
    taps = kernel_at_scale(mother_wavelet(), 100.0, 48000).taps
    nfft = 1 << 18
    k = np.argmax(np.abs(np.fft.rfft(taps, nfft)))
    period = nfft / k
    assert period == pytest.approx(150, rel=0.05)


def test_kernel_errors():
    base = mother_wavelet()
    with pytest.raises(ValueError):
        kernel_at_scale(base, 0.0, 48000)
    with pytest.raises(ValueError):
        kernel_at_scale(base, 0.05, 48000)
    with pytest.raises(ValueError):
        kernel_at_scale(base, 1.0, 0)


@pytest.mark.parametrize("scale,freq", [(10, 3200), (23, 1391), (50, 640), (100, 320)])
def test_scale_frequency_pairs(scale, freq):
    assert scale_to_frequency(scale, 48000) == pytest.approx(freq, rel=0.05)


def test_center_frequency_is_dominant_bin():
    assert center_frequency() == pytest.approx(2 / 3, abs=1e-12)
    # a brute-force DFT over the support agrees on the dominant bin
    psi = mother_wavelet().taps[:15 * 1024]
    n = np.arange(psi.size)
    mags = [abs(np.dot(psi, np.exp(-2j * np.pi * k * n / psi.size))) for k in range(1, 40)]
    assert (int(np.argmax(mags)) + 1) / 15 == center_frequency()


def test_scale_to_frequency_monotone_and_linear_in_rate():
    s = np.linspace(1, 200, 50)
    f = scale_to_frequency(s, 16000)
    assert np.all(np.diff(f) < 0)
    np.testing.assert_allclose(scale_to_frequency(s, 32000), 2 * f)
    with pytest.raises(ValueError):
        scale_to_frequency(0, 16000)


def test_default_bank_48k():
    bank = default_scale_bank(48000)
    assert len(bank.hf_scales) == 12 and len(bank.lf_scales) == 6
    assert min(bank.hf_scales) == pytest.approx(10) and max(bank.hf_scales) == pytest.approx(32)
    assert all(32 < s <= 107 for s in bank.lf_scales)
    assert max(bank.hf_scales) < min(bank.lf_scales)
    freqs = scale_to_frequency(np.array(bank.hf_scales + bank.lf_scales), 48000)
    assert freqs.min() >= 300 - 1e-9 and freqs.max() <= 3200 + 1e-9


@pytest.mark.parametrize("rate", [8000, 16000, 22050, 44100])
def test_default_bank_other_rates(rate):
    bank = default_scale_bank(rate)
    assert len(bank.hf_scales) > len(bank.lf_scales)
    assert max(bank.hf_scales) < min(bank.lf_scales)
    for s in bank.hf_scales + bank.lf_scales:
        kernel_at_scale(mother_wavelet(), s, rate)


def test_default_bank_rejects_low_rate():
    with pytest.raises(ValueError, match="Nyquist"):
        default_scale_bank(6000)


def test_scale_bank_validation():
    with pytest.raises(ValueError):
        ScaleBank((), (1.0,))
    with pytest.raises(ValueError):
        ScaleBank((2.0, 1.0), (5.0,))
