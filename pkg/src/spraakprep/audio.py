"""Sample-level signal operations on mono PCM audio.

All functions are pure: given the same inputs (and, where randomness is
involved, the same RNG handle) they return the same samples. Clips are
float64 in [-1, 1]; the sample rate is whatever the input file carries,
no resampling happens anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from . import kernels
from .errors import (
    EmptyAudioError,
    SampleRateMismatchError,
    SilentAudioError,
    SpanError,
    UnreadableFileError,
    UnsupportedEncodingError,
)

_INT16_FULL_SCALE = 32768.0


@dataclass(frozen=True)
class AudioClip:
    """Mono sample buffer plus its rate. Immutable by convention."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"expected mono 1-D samples, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if not isinstance(self.sample_rate, (int, np.integer)) or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class MixReport:
    """Provenance of one mixing operation."""

    snr_db: float
    gain: float
    peak_scale: float
    noise_offset: int


def read_pcm(path) -> AudioClip:
    """Read a 16-bit or 32-bit-float PCM WAV file as a mono clip.

    Stereo is downmixed by channel averaging; integer samples are scaled
    to [-1, 1); float samples outside [-1, 1] are clipped.
    """
    try:
        rate, data = wavfile.read(path)
    except (OSError, FileNotFoundError) as exc:
        raise UnreadableFileError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UnsupportedEncodingError(f"{path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / _INT16_FULL_SCALE
    elif data.dtype == np.float32:
        samples = np.clip(data.astype(np.float64), -1.0, 1.0)
    else:
        raise UnsupportedEncodingError(
            f"{path}: dtype {data.dtype} not supported (16-bit PCM or 32-bit float only)"
        )
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    elif samples.ndim != 1:
        raise UnsupportedEncodingError(f"{path}: unsupported channel layout {data.shape}")
    return AudioClip(samples, int(rate))


def write_pcm(path, clip: AudioClip, encoding: str = "pcm16") -> None:
    """Write a clip as WAV. ``encoding`` is ``pcm16`` or ``float32``.

    pcm16 round-trips exactly with read_pcm for values on the int16 grid.
    """
    if encoding == "pcm16":
        scaled = np.rint(np.clip(clip.samples, -1.0, 1.0) * _INT16_FULL_SCALE)
        data = np.clip(scaled, -32768, 32767).astype(np.int16)
    elif encoding == "float32":
        data = clip.samples.astype(np.float32)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    wavfile.write(path, clip.sample_rate, data)


def probe_wav(path) -> tuple[int, float]:
    """(sample_rate, duration_s) without materializing a float copy."""
    try:
        rate, data = wavfile.read(path, mmap=True)
    except (OSError, FileNotFoundError) as exc:
        raise UnreadableFileError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UnsupportedEncodingError(f"{path}: {exc}") from exc
    return int(rate), data.shape[0] / rate


def rms_power(clip: AudioClip) -> float:
    """Mean of squared samples."""
    if len(clip) == 0:
        raise EmptyAudioError("rms_power of an empty clip")
    return kernels.rms_power(clip.samples)


def match_length(clip: AudioClip, num_samples: int, rng=None) -> tuple[AudioClip, int]:
    """Length-match a clip: random-crop when longer, tile when shorter.

    The crop offset comes from ``rng`` (0 when rng is None); tiling loops
    the clip from its start. Returns the matched clip and the offset used.
    """
    if len(clip) == 0:
        raise EmptyAudioError("cannot length-match an empty clip")
    if num_samples < 0:
        raise ValueError("num_samples must be >= 0")
    if len(clip) > num_samples and rng is not None:
        offset = int(rng.integers(0, len(clip) - num_samples + 1))
    else:
        offset = 0
    out = kernels.cyclic_take(clip.samples, num_samples, offset)
    return AudioClip(out, clip.sample_rate), offset


def mix_at_snr(signal: AudioClip, noise: AudioClip, snr_db: float, rng=None) -> AudioClip:
    """Add noise to signal at the requested SNR; see mix_at_snr_report."""
    mixed, _ = mix_at_snr_report(signal, noise, snr_db, rng)
    return mixed


def mix_at_snr_report(
    signal: AudioClip, noise: AudioClip, snr_db: float, rng=None
) -> tuple[AudioClip, MixReport]:
    """Mix noise into signal at an exact signal-to-noise ratio.

    The noise is length-matched to the signal (random crop / tile), then
    scaled by gain g so that 10*log10(P_signal / (g^2 * P_noise)) equals
    ``snr_db`` with powers measured as mean squared sample value. If the
    sum exceeds full scale anywhere, the whole mixture is rescaled by its
    peak, which leaves the ratio intact. The report carries the gain, the
    peak rescale factor and the noise offset so the mix is reproducible
    and re-measurable.
    """
    if signal.sample_rate != noise.sample_rate:
        raise SampleRateMismatchError(
            f"signal at {signal.sample_rate} Hz vs noise at {noise.sample_rate} Hz"
        )
    p_signal = rms_power(signal)
    if p_signal == 0.0:
        raise SilentAudioError("signal is silent, SNR undefined")
    matched, offset = match_length(noise, len(signal), rng)
    p_noise = kernels.rms_power(matched.samples)
    if p_noise == 0.0:
        raise SilentAudioError("noise is silent, SNR undefined")
    gain = math.sqrt(p_signal / p_noise) * 10.0 ** (-snr_db / 20.0)
    mixed, peak_scale = kernels.scale_add_peak(signal.samples, matched.samples, gain)
    clip = AudioClip(mixed, signal.sample_rate)
    return clip, MixReport(snr_db=snr_db, gain=gain, peak_scale=peak_scale, noise_offset=offset)


def concat(a: AudioClip, b: AudioClip) -> AudioClip:
    """a followed by b, no crossfade."""
    if a.sample_rate != b.sample_rate:
        raise SampleRateMismatchError(f"{a.sample_rate} Hz vs {b.sample_rate} Hz")
    return AudioClip(np.concatenate([a.samples, b.samples]), a.sample_rate)


def crop(clip: AudioClip, start_s: float, end_s: float) -> AudioClip:
    """Cut [start_s, end_s), times rounded to the nearest sample boundary."""
    start = round(start_s * clip.sample_rate)
    end = round(end_s * clip.sample_rate)
    if start < 0 or end > len(clip) or start >= end:
        raise SpanError(
            f"span [{start_s}, {end_s}] s invalid for a clip of {clip.duration_s:.6f} s"
        )
    return AudioClip(clip.samples[start:end].copy(), clip.sample_rate)
