import math
import struct
import wave

import numpy as np
import pytest

from conftest import noise_clip, sine_clip
from spraakprep.audio import (
    AudioClip,
    concat,
    crop,
    match_length,
    mix_at_snr,
    mix_at_snr_report,
    probe_wav,
    read_pcm,
    rms_power,
    write_pcm,
)
from spraakprep.errors import (
    EmptyAudioError,
    SampleRateMismatchError,
    SilentAudioError,
    SpanError,
    UnreadableFileError,
    UnsupportedEncodingError,
)


def _write_wave_stdlib(path, frames: bytes, channels: int, rate: int = 16000):
    # Independent writer: stdlib wave, not our own write_pcm.
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(frames)


class TestReadWrite:
    def test_one_second_silence(self, tmp_path):
        path = tmp_path / "silence.wav"
        _write_wave_stdlib(path, b"\x00\x00" * 16000, channels=1)
        clip = read_pcm(path)
        assert clip.sample_rate == 16000
        assert len(clip) == 16000
        assert np.all(clip.samples == 0.0)

    def test_stereo_averaging_symmetry(self, tmp_path):
        path = tmp_path / "stereo.wav"
        frame = struct.pack("<hh", 16384, -16384)  # +0.5, -0.5
        _write_wave_stdlib(path, frame * 1000, channels=2)
        clip = read_pcm(path)
        assert len(clip) == 1000
        assert np.all(clip.samples == 0.0)

    def test_thirty_minute_file_sample_count(self, tmp_path):
        path = tmp_path / "long.wav"
        from scipy.io import wavfile

        wavfile.write(path, 16000, np.zeros(30 * 60 * 16000, dtype=np.int16))
        clip = read_pcm(path)
        assert len(clip) == 28_800_000

    def test_pcm16_round_trip_bit_exact(self, tmp_path, rng):
        values = rng.integers(-32768, 32768, 5000).astype(np.int16)
        clip = AudioClip(values.astype(np.float64) / 32768.0, 16000)
        path = tmp_path / "rt.wav"
        write_pcm(path, clip, encoding="pcm16")
        back = read_pcm(path)
        assert np.array_equal(back.samples, clip.samples)

    def test_float32_round_trip(self, tmp_path, rng):
        clip = noise_clip(rng, 0.25)
        path = tmp_path / "f32.wav"
        write_pcm(path, clip, encoding="float32")
        back = read_pcm(path)
        np.testing.assert_allclose(back.samples, clip.samples, atol=1e-7)

    def test_missing_file(self, tmp_path):
        with pytest.raises(UnreadableFileError):
            read_pcm(tmp_path / "nope.wav")

    def test_garbage_file(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"this is not a RIFF file at all")
        with pytest.raises(UnsupportedEncodingError):
            read_pcm(path)

    def test_unsupported_bit_depth(self, tmp_path):
        from scipy.io import wavfile

        path = tmp_path / "u8.wav"
        wavfile.write(path, 16000, np.zeros(100, dtype=np.uint8))
        with pytest.raises(UnsupportedEncodingError):
            read_pcm(path)

    def test_probe_wav(self, tmp_path, rng):
        clip = noise_clip(rng, 2.5)
        path = tmp_path / "probe.wav"
        write_pcm(path, clip)
        rate, duration = probe_wav(path)
        assert rate == 16000
        assert duration == pytest.approx(2.5)


class TestRmsPower:
    def test_zero_clip(self):
        assert rms_power(AudioClip(np.zeros(100), 16000)) == 0.0

    def test_constant_half(self):
        assert rms_power(AudioClip(np.full(640, 0.5), 16000)) == pytest.approx(0.25)

    def test_unit_sine_whole_periods(self):
        # 100 whole periods; analytic mean square is 1/2. The direct
        # summation below is the independent check on our kernel path.
        clip = sine_clip(freq_hz=100.0, duration_s=1.0, amplitude=1.0)
        direct = math.fsum(float(s) * float(s) for s in clip.samples) / len(clip)
        assert rms_power(clip) == pytest.approx(direct, rel=1e-12)
        assert rms_power(clip) == pytest.approx(0.5, abs=1e-6)

    def test_empty_clip(self):
        with pytest.raises(EmptyAudioError):
            rms_power(AudioClip(np.zeros(0), 16000))


class TestMix:
    def test_equal_power_zero_db_gain(self):
        signal = sine_clip(200.0, 0.5, amplitude=0.4)
        noise = sine_clip(310.0, 0.5, amplitude=0.4)
        p_ratio = rms_power(signal) / rms_power(noise)
        _, report = mix_at_snr_report(signal, noise, 0.0)
        assert report.gain == pytest.approx(math.sqrt(p_ratio), rel=1e-12)
        assert report.gain == pytest.approx(1.0, abs=1e-3)

    def test_equal_power_fifteen_db_gain(self):
        # Same waveform as signal and noise: powers match exactly, so
        # the gain must be exactly 10^(-15/20) = 0.17783.
        signal = sine_clip(200.0, 0.5, amplitude=0.4)
        _, report = mix_at_snr_report(signal, signal, 15.0)
        assert report.gain == pytest.approx(10 ** (-15 / 20), rel=1e-12)
        assert report.gain == pytest.approx(0.17783, abs=5e-6)

    def test_remeasured_snr_matches_request(self, rng):
        # Oracle: re-measure the SNR from the mixture's components.
        for _ in range(50):
            signal = noise_clip(rng, float(rng.uniform(0.2, 1.0)), amplitude=0.5)
            noise = noise_clip(rng, float(rng.uniform(0.1, 2.0)), amplitude=0.4)
            snr = float(rng.uniform(0.0, 15.0))
            mixed, report = mix_at_snr_report(signal, noise, snr, rng)
            noise_part = mixed.samples - signal.samples * report.peak_scale
            measured = 10.0 * math.log10(
                rms_power(AudioClip(signal.samples * report.peak_scale, 16000))
                / rms_power(AudioClip(noise_part, 16000))
            )
            assert measured == pytest.approx(snr, abs=0.05)

    def test_peak_protection_rescales_and_preserves_ratio(self):
        signal = sine_clip(150.0, 0.5, amplitude=0.95)
        noise = sine_clip(150.0, 0.5, amplitude=0.95)  # in phase: must clip
        mixed, report = mix_at_snr_report(signal, noise, 0.0)
        assert report.peak_scale < 1.0
        assert np.max(np.abs(mixed.samples)) <= 1.0 + 1e-12
        noise_part = mixed.samples - signal.samples * report.peak_scale
        measured = 10.0 * math.log10(
            rms_power(AudioClip(signal.samples * report.peak_scale, 16000))
            / rms_power(AudioClip(noise_part, 16000))
        )
        assert measured == pytest.approx(0.0, abs=0.05)

    def test_output_length_equals_signal(self, rng):
        signal = noise_clip(rng, 1.0)
        noise = noise_clip(rng, 0.25)
        mixed = mix_at_snr(signal, noise, 5.0, rng)
        assert len(mixed) == len(signal)

    def test_short_noise_is_tiled(self):
        signal = AudioClip(np.full(6, 0.5), 16000)
        noise = AudioClip(np.array([0.1, 0.2]), 16000)
        mixed, report = mix_at_snr_report(signal, noise, 0.0)
        tiled = np.array([0.1, 0.2, 0.1, 0.2, 0.1, 0.2])
        np.testing.assert_allclose(
            mixed.samples, (signal.samples + report.gain * tiled) * report.peak_scale, rtol=1e-12
        )

    def test_long_noise_random_crop_deterministic(self, rng):
        signal = noise_clip(rng, 0.5)
        noise = noise_clip(rng, 2.0)
        a = mix_at_snr(signal, noise, 3.0, np.random.default_rng(99))
        b = mix_at_snr(signal, noise, 3.0, np.random.default_rng(99))
        assert np.array_equal(a.samples, b.samples)

    def test_sample_rate_mismatch(self, rng):
        with pytest.raises(SampleRateMismatchError):
            mix_at_snr(noise_clip(rng, 0.1), noise_clip(rng, 0.1, sample_rate=8000), 5.0)

    def test_silent_inputs_rejected(self, rng):
        silent = AudioClip(np.zeros(1000), 16000)
        live = noise_clip(rng, 0.1)
        with pytest.raises(SilentAudioError):
            mix_at_snr(silent, live, 5.0)
        with pytest.raises(SilentAudioError):
            mix_at_snr(live, silent, 5.0)


class TestConcatCrop:
    def test_concat_additive(self, rng):
        a = noise_clip(rng, 1.0)
        b = noise_clip(rng, 2.0)
        out = concat(a, b)
        assert out.duration_s == pytest.approx(3.0)
        assert np.array_equal(out.samples[: len(a)], a.samples)
        assert np.array_equal(out.samples[len(a) :], b.samples)

    def test_concat_identity_with_empty(self, rng):
        a = noise_clip(rng, 0.5)
        out = concat(a, AudioClip(np.zeros(0), 16000))
        assert np.array_equal(out.samples, a.samples)

    def test_concat_associative(self, rng):
        a, b, c = (noise_clip(rng, d) for d in (0.1, 0.2, 0.3))
        left = concat(concat(a, b), c)
        right = concat(a, concat(b, c))
        assert np.array_equal(left.samples, right.samples)

    def test_concat_rate_mismatch(self, rng):
        with pytest.raises(SampleRateMismatchError):
            concat(noise_clip(rng, 0.1), noise_clip(rng, 0.1, sample_rate=22050))

    def test_crop_identity(self, rng):
        clip = noise_clip(rng, 10.0)
        out = crop(clip, 0.0, 10.0)
        assert np.array_equal(out.samples, clip.samples)

    def test_crop_sample_count(self, rng):
        clip = noise_clip(rng, 10.0)
        assert len(crop(clip, 2.0, 5.0)) == 48000

    def test_crop_reversed_span(self, rng):
        with pytest.raises(SpanError):
            crop(noise_clip(rng, 10.0), 5.0, 4.0)

    def test_crop_out_of_range(self, rng):
        with pytest.raises(SpanError):
            crop(noise_clip(rng, 1.0), 0.5, 1.5)
        with pytest.raises(SpanError):
            crop(noise_clip(rng, 1.0), -0.2, 0.5)

    def test_crop_composition_on_sample_grid(self, rng):
        clip = noise_clip(rng, 4.0)
        sr = clip.sample_rate
        for _ in range(25):
            a, b = sorted(rng.integers(0, len(clip) + 1, 2))
            if b - a < 2:
                continue
            x, y = sorted(rng.integers(0, b - a + 1, 2))
            if y - x < 1:
                continue
            inner = crop(crop(clip, a / sr, b / sr), x / sr, y / sr)
            direct = crop(clip, (a + x) / sr, (a + y) / sr)
            assert np.array_equal(inner.samples, direct.samples)

    def test_crop_composition_off_grid_within_one_sample(self, rng):
        clip = noise_clip(rng, 4.0)
        a, b = 0.3337, 3.8881
        x, y = 0.2503, 2.9997
        inner = crop(crop(clip, a, b), x, y)
        direct = crop(clip, a + x, a + y)
        assert abs(len(inner) - len(direct)) <= 1


class TestMatchLength:
    def test_tile_shorter(self):
        clip = AudioClip(np.array([0.1, -0.2, 0.3]), 16000)
        out, offset = match_length(clip, 7)
        assert offset == 0
        np.testing.assert_array_equal(out.samples, [0.1, -0.2, 0.3, 0.1, -0.2, 0.3, 0.1])

    def test_crop_longer_with_rng(self, rng):
        clip = noise_clip(rng, 1.0)
        out, offset = match_length(clip, 100, np.random.default_rng(5))
        assert len(out) == 100
        assert np.array_equal(out.samples, clip.samples[offset : offset + 100])

    def test_empty_source(self):
        with pytest.raises(EmptyAudioError):
            match_length(AudioClip(np.zeros(0), 16000), 10)


class TestClipValidation:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            AudioClip(np.array([0.0, np.nan]), 16000)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            AudioClip(np.zeros(10), 0)

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            AudioClip(np.zeros((10, 2)), 16000)
