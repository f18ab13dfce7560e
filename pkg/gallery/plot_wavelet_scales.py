"""
DB8 kernels and the scales they listen to
=========================================

The detector never evaluates a closed-form wavelet: DB8 has none. Instead the
mother wavelet is sampled once with the cascade algorithm and every analysis
kernel is a dilated copy of those samples.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wcsed import default_scale_bank, kernel_at_scale, mother_wavelet, scale_to_frequency
from wcsed.wavelet import center_frequency

###############################################################################
# The cascade samples psi on [0, 15] at 1024 points per unit.
base = mother_wavelet(10)
print(f"{base.taps.size} samples, centre frequency {center_frequency():.4f} cycles/unit")

###############################################################################
# A kernel at scale ``s`` spans ``15 s`` samples; its pseudo-frequency is
# ``Fc * fs / s``. At 48 kHz this puts scale 10 at 3.2 kHz and scale 100 at 320 Hz.
for s in (10, 23, 50, 100):
    k = kernel_at_scale(base, s, 48000)
    print(f"scale {s:>3}: {k.support_len:>5} taps, {scale_to_frequency(s, 48000):7.1f} Hz")

###############################################################################
# Default banks: twelve high-frequency scales, six low-frequency ones.
bank = default_scale_bank(48000)
print("hf:", np.round(bank.hf_scales, 2))
print("lf:", np.round(bank.lf_scales, 2))

fig, axes = plt.subplots(2, 1, figsize=(8, 5))
axes[0].plot(base.grid, base.taps)
axes[0].set_title("DB8 wavelet (cascade, 10 levels)")
k = kernel_at_scale(base, 100, 48000)
axes[1].plot(np.arange(k.support_len) / 48.0, k.taps)
axes[1].set_xlabel("ms at 48 kHz")
axes[1].set_title("kernel at scale 100 (~320 Hz)")
fig.tight_layout()
fig.savefig("wavelet_scales.png", dpi=100)
