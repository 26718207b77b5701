import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240612)


def sine_clip(freq_hz=440.0, duration_s=1.0, sample_rate=16000, amplitude=1.0):
    from spraakprep.audio import AudioClip

    n = round(duration_s * sample_rate)
    t = np.arange(n) / sample_rate
    return AudioClip(amplitude * np.sin(2 * np.pi * freq_hz * t), sample_rate)


def noise_clip(rng, duration_s=1.0, sample_rate=16000, amplitude=0.3):
    from spraakprep.audio import AudioClip

    n = round(duration_s * sample_rate)
    return AudioClip(amplitude * rng.uniform(-1.0, 1.0, n), sample_rate)
