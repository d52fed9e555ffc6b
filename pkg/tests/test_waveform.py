"""
Signal Core Tests
=================

Tests for waveforms and framing including:
- Waveform validation
- Frame counts and padding
- Overlap-add reconstruction
- Convolution and power
- WAV round trips through soundfile
"""

import numpy as np
import pytest

from src.dsp import (
    Waveform,
    convolve,
    frame,
    mean_power,
    num_frames,
    overlap_add,
    padded_length,
    power_db,
    read_wav,
    write_wav,
)
from src.errors import (
    EchoExtractError,
    EmptyInputError,
    InvalidSignalError,
    SampleRateMismatchError,
    UnsupportedAudioError,
)


class TestWaveform:
    """Test the waveform container."""

    def test_samples_are_float64(self):
        """Integer input is stored as float64."""
        w = Waveform(samples=np.array([1, 2, 3]), sample_rate=8000)
        assert w.samples.dtype == np.float64
        assert len(w) == 3

    def test_duration(self):
        """Duration is samples over rate."""
        assert Waveform(samples=np.zeros(16000), sample_rate=16000).duration == 1.0

    def test_rejects_two_dimensional(self):
        """Only mono signals are accepted."""
        with pytest.raises(InvalidSignalError, match="1-D"):
            Waveform(samples=np.zeros((2, 4)), sample_rate=8000)

    def test_rejects_non_finite(self):
        """NaN samples are rejected."""
        with pytest.raises(InvalidSignalError, match="non-finite"):
            Waveform(samples=np.array([0.0, np.nan]), sample_rate=8000)

    def test_rejects_non_positive_rate(self):
        """Sample rates must be positive."""
        with pytest.raises(InvalidSignalError, match="sample rate"):
            Waveform(samples=np.zeros(4), sample_rate=0)

    def test_validation_errors_share_the_hierarchy(self):
        """Waveform errors are package errors and still ValueErrors."""
        with pytest.raises(EchoExtractError):
            Waveform(samples=np.array([np.inf]), sample_rate=8000)
        with pytest.raises(ValueError):
            Waveform(samples=np.zeros((1, 1)), sample_rate=8000)

    def test_require_rate(self):
        """require_rate raises on a different rate."""
        w = Waveform(samples=np.zeros(4), sample_rate=8000)
        assert w.require_rate(8000) is w
        with pytest.raises(SampleRateMismatchError):
            w.require_rate(16000)


class TestFraming:
    """Test analysis framing and overlap-add."""

    def test_four_second_frame_count(self):
        """64,000 samples with L=32, hop 16 give 3,999 frames."""
        frames = frame(np.zeros(64000))
        assert frames.num_frames == 3999
        assert frames.frame_len == 32
        assert num_frames(64000) == 3999

    def test_padding_completes_last_frame(self):
        """A ragged tail is zero-padded to a whole frame."""
        assert padded_length(40, 32, 16) == 48
        frames = frame(np.ones(40), 32, 16)
        assert frames.num_frames == 2
        assert np.all(frames.data[8:, 1] == 0.0)

    def test_short_signal_gives_one_frame(self):
        """A signal shorter than one frame still yields a frame."""
        assert frame(np.ones(5), 32, 16).num_frames == 1

    def test_columns_hold_consecutive_samples(self):
        """Column t starts at sample t * hop."""
        x = np.arange(100, dtype=np.float64)
        frames = frame(x, 8, 4)
        np.testing.assert_array_equal(frames.data[:, 3], x[12:20])

    def test_normalized_overlap_add_inverts_framing(self, rng):
        """Normalized OLA reconstructs the signal to 1e-12."""
        x = rng.normal(size=64000)
        y = overlap_add(frame(x), normalize=True)
        assert y.shape == x.shape
        assert np.max(np.abs(y - x)) <= 1e-12

    def test_plain_overlap_add_doubles_interior(self, rng):
        """Without normalization, half-overlapped interior samples are counted twice."""
        x = rng.normal(size=320)
        y = overlap_add(frame(x, 32, 16))
        np.testing.assert_allclose(y[16:-16], 2 * x[16:-16])

    def test_empty_input(self):
        """Framing an empty signal raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            frame(np.zeros(0))

    def test_invalid_hop(self):
        """Non-positive hop is rejected."""
        with pytest.raises(InvalidSignalError):
            frame(np.ones(10), 4, 0)

    def test_hop_longer_than_frame(self):
        """A hop past the frame length would skip samples and is rejected."""
        with pytest.raises(InvalidSignalError, match="exceeds frame_len") as info:
            frame(np.ones(40), 8, 9)
        assert info.value.op == "frame"

    def test_hop_equal_to_frame_reconstructs(self, rng):
        """Back-to-back frames still invert exactly."""
        x = rng.normal(size=30)
        np.testing.assert_array_equal(overlap_add(frame(x, 8, 8), normalize=True), x)


class TestConvolutionAndPower:
    """Test convolution and power helpers."""

    def test_full_convolution_length(self, rng):
        """Output length is len(a) + len(h) - 1."""
        a, h = rng.normal(size=100), rng.normal(size=17)
        out = convolve(a, h)
        assert out.shape == (116,)
        np.testing.assert_allclose(out, np.convolve(a, h), atol=1e-10)

    def test_convolution_with_delta(self, rng):
        """Convolving with a unit impulse is the identity."""
        a = rng.normal(size=50)
        np.testing.assert_allclose(convolve(a, np.array([1.0])), a, atol=1e-12)

    def test_convolve_empty(self):
        """Empty operands raise EmptyInputError."""
        with pytest.raises(EmptyInputError):
            convolve(np.zeros(0), np.ones(3))
        with pytest.raises(EmptyInputError):
            convolve(np.ones(3), np.zeros(0))

    def test_convolve_rate_mismatch(self):
        """Waveforms at different rates cannot be convolved."""
        a = Waveform(samples=np.ones(4), sample_rate=8000)
        h = Waveform(samples=np.ones(2), sample_rate=16000)
        with pytest.raises(SampleRateMismatchError):
            convolve(a, h)

    def test_power_db_of_unit_sine(self):
        """A unit-amplitude sine has mean power 0.5 (about -3.01 dB)."""
        t = np.arange(8000) / 8000
        x = np.sin(2 * np.pi * 100 * t)
        assert mean_power(x) == pytest.approx(0.5, rel=1e-6)
        assert power_db(x) == pytest.approx(10 * np.log10(0.5), abs=1e-4)

    def test_power_db_of_silence_is_floored(self):
        """Silence hits the 1e-12 floor instead of -inf."""
        assert power_db(np.zeros(10)) == pytest.approx(-120.0)


class TestWavIO:
    """Test WAV reading and writing."""

    def test_float_round_trip(self, tmp_path, rng):
        """FLOAT WAV keeps samples to float32 precision."""
        x = Waveform(samples=rng.uniform(-0.9, 0.9, size=800), sample_rate=8000)
        path = write_wav(tmp_path / "sub" / "x.wav", x)
        back = read_wav(path, expected_rate=8000)
        assert back.sample_rate == 8000
        np.testing.assert_allclose(back.samples, x.samples, atol=1e-7)

    def test_expected_rate_mismatch(self, tmp_path):
        """Reading at an unexpected rate raises SampleRateMismatchError."""
        path = write_wav(tmp_path / "x.wav", Waveform(samples=np.zeros(10), sample_rate=8000))
        with pytest.raises(SampleRateMismatchError):
            read_wav(path, expected_rate=16000)

    def test_multichannel_rejected(self, tmp_path):
        """Stereo files are not accepted."""
        import soundfile as sf

        path = tmp_path / "stereo.wav"
        sf.write(str(path), np.zeros((10, 2), dtype=np.float32), 8000)
        with pytest.raises(UnsupportedAudioError, match="channels"):
            read_wav(path)

    def test_unreadable_file(self, tmp_path):
        """A non-audio file raises UnsupportedAudioError."""
        path = tmp_path / "bad.wav"
        path.write_text("not audio")
        with pytest.raises(UnsupportedAudioError):
            read_wav(path)

    def test_pcm16_clips(self, tmp_path):
        """Integer export clips samples beyond full scale."""
        x = Waveform(samples=np.array([2.0, -2.0, 0.5]), sample_rate=8000)
        back = read_wav(write_wav(tmp_path / "x.wav", x, subtype="PCM_16"))
        assert np.max(np.abs(back.samples)) <= 1.0
