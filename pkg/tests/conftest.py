import numpy as np
import pytest

from wcsed import SignalBuffer


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def tone(freq, seconds, sample_rate=48000, amplitude=0.5):
    t = np.arange(int(seconds * sample_rate)) / sample_rate
    return SignalBuffer(amplitude * np.sin(2 * np.pi * freq * t), sample_rate)
