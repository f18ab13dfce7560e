"""
Entropy curves on a recording with a breath and a click
=======================================================

A synthetic utterance sits between a mouth click and a breath. The
low-frequency entropy curve marks the voiced core; the high-frequency curve is
used to stretch its edges, and the silent gaps stop the stretch before either
artifact is swallowed.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wcsed import Burst, ItemSpec, analyze, synthesize_test_signal

spec = ItemSpec(
    duration=2.6, speech_start=0.8, speech_end=1.9, seed=4, f0=170.0, n_harmonics=6,
    bursts=(Burst("click", 0.45, 0.02, (2000.0, 6000.0), 0.3),
            Burst("breath", 2.05, 0.35, (1000.0, 4000.0), 0.08)),
)
signal, label = synthesize_test_signal(spec)
det = analyze(signal)
ep = det.endpoints
print(f"truth frames {label.start_frame}-{label.end_frame}, detected {ep.start_frame}-{ep.end_frame}")
print(f"core region {det.core}, thresholds {det.thresholds}")

###############################################################################
# Plot the waveform with the extracted span, and both entropy curves.
t = np.arange(len(signal)) / signal.sample_rate
frames = np.arange(len(det.ce_l)) * 0.01
fig, (a0, a1) = plt.subplots(2, 1, figsize=(9, 5), sharex=True)
a0.plot(t, signal.samples, lw=0.5)
a0.axvspan(ep.start_sample / signal.sample_rate, ep.end_sample / signal.sample_rate, alpha=0.2, color="g")
a1.plot(frames, det.ce_l.values, label="ce_l")
a1.plot(frames, det.ce_h.values, label="ce_h")
a1.axhline(det.thresholds.core_threshold, ls="--", c="C0")
a1.axhline(det.thresholds.edge_threshold, ls=":", c="C1")
a1.set_xlabel("s")
a1.legend()
fig.tight_layout()
fig.savefig("entropy_curves.png", dpi=100)
