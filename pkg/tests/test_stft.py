"""Unit tests for framed STFT analysis and synthesis."""

import numpy as np
import pytest

from app.core.errors import HopSizeMismatchError, SignalTooShortError
from app.core.state import StreamState
from app.core.types import ComplexSpectrogram, Waveform, from_polar, to_polar, wrap_phase
from app.dsp.stft import (
    hann_window,
    istft,
    istft_frame_push,
    num_frames,
    ola_normalizer,
    stft,
    stft_frame_push,
)
from tests.helpers import noise, sine

FFT, HOP = 1536, 768


def interior(x: np.ndarray, length: int) -> np.ndarray:
    return x[FFT : length - FFT]


class TestFraming:
    """Frame count and layout."""

    def test_single_frame(self):
        """Exactly one frame of samples gives T=1, F=769."""
        spec = stft(Waveform(np.zeros(1536)), FFT, HOP)
        assert spec.frames.shape == (1, 769)

    def test_one_hop_past_first_frame(self):
        """2304 samples give two frames."""
        assert stft(Waveform(np.zeros(2304)), FFT, HOP).num_frames == 2

    def test_one_second(self):
        """48000 samples: the framing formula and enumerated frame starts agree on 62 frames."""
        starts = []
        t = 0
        while True:
            starts.append(t * HOP)
            if t * HOP + FFT >= 48000:
                break
            t += 1
        assert num_frames(48000, FFT, HOP) == len(starts) == 62
        assert stft(Waveform(np.zeros(48000)), FFT, HOP).num_frames == 62

    def test_too_short_raises(self):
        """Signals shorter than one frame are rejected, not padded."""
        with pytest.raises(SignalTooShortError):
            stft(Waveform(np.zeros(1535)), FFT, HOP)

    def test_bad_hop_raises(self):
        """Only 50% overlap is supported."""
        with pytest.raises(ValueError, match="hop"):
            stft(Waveform(np.zeros(4096)), FFT, 512)

    def test_frame_contents(self):
        """Frame t is the windowed FFT of samples [t*hop, t*hop + fft)."""
        wave = noise(0.1, seed=3)
        spec = stft(wave, FFT, HOP)
        expected = np.fft.rfft(wave.samples[HOP : HOP + FFT] * hann_window(FFT))
        np.testing.assert_allclose(spec.frames[1], expected, atol=1e-12)

    def test_last_frame_zero_padded(self):
        """The partial last frame sees zeros beyond the signal."""
        wave = noise(0.05, seed=4)  # 2400 samples -> 3 frames, last one partial
        spec = stft(wave, FFT, HOP)
        tail = np.zeros(FFT)
        tail[: 2400 - 2 * HOP] = wave.samples[2 * HOP :]
        expected = np.fft.rfft(tail * hann_window(FFT))
        np.testing.assert_allclose(spec.frames[-1], expected, atol=1e-12)


class TestWindow:
    """Window and normalizer properties."""

    def test_periodic_hann(self):
        """Window is DFT-even: w[0] = 0 and w[n/2] = 1."""
        w = hann_window(FFT)
        assert w[0] == 0.0
        assert w[FFT // 2] == pytest.approx(1.0)
        np.testing.assert_allclose(w[1:], w[1:][::-1], atol=1e-15)

    def test_cola(self):
        """Shifted Hann windows sum to one at 50% overlap."""
        w = hann_window(FFT)
        np.testing.assert_allclose(w[:HOP] + w[HOP:], 1.0, atol=1e-12)

    def test_normalizer_positive(self):
        """Squared-window normalizer is bounded away from zero."""
        norm = ola_normalizer(FFT, HOP)
        assert norm.shape == (HOP,)
        assert norm.min() >= 0.5 - 1e-12


class TestRoundTrip:
    """istft(stft(x)) reconstructs x on the fully overlapped interior."""

    def test_zero_spectrogram(self):
        """All-zero spectrogram synthesizes silence."""
        out = istft(ComplexSpectrogram(np.zeros((5, 769), complex), FFT, HOP))
        assert len(out) == 4 * HOP + FFT
        assert not np.any(out.samples)

    @pytest.mark.parametrize("seed", range(10))
    def test_noise(self, seed):
        """Seeded noise: interior relative L2 error below 1e-6."""
        wave = noise(1.0, seed=seed)
        out = istft(stft(wave, FFT, HOP))
        ref = interior(wave.samples, len(wave))
        err = np.linalg.norm(interior(out.samples, len(wave)) - ref) / np.linalg.norm(ref)
        assert err < 1e-6

    def test_sinusoid(self):
        """1 kHz sine: interior max abs error below 1e-6."""
        wave = sine(1000.0, 1.0)
        out = istft(stft(wave, FFT, HOP))
        err = interior(out.samples, len(wave)) - interior(wave.samples, len(wave))
        assert np.max(np.abs(err)) < 1e-6

    def test_single_precision(self):
        """float32 input stays within the looser tolerance."""
        wave = Waveform(noise(1.0, seed=11).samples.astype(np.float32))
        out = istft(stft(wave, FFT, HOP))
        ref = interior(wave.samples.astype(np.float64), len(wave))
        err = np.linalg.norm(interior(out.samples, len(wave)) - ref) / np.linalg.norm(ref)
        assert err < 1e-4


class TestProperties:
    """Linearity and Parseval sanity."""

    def test_linearity(self):
        """stft(a*x + b*y) = a*stft(x) + b*stft(y)."""
        x, y = noise(0.5, seed=1), noise(0.5, seed=2)
        combined = stft(Waveform(2.0 * x.samples - 0.5 * y.samples), FFT, HOP).frames
        separate = 2.0 * stft(x, FFT, HOP).frames - 0.5 * stft(y, FFT, HOP).frames
        assert np.linalg.norm(combined - separate) / np.linalg.norm(separate) < 1e-9

    def test_parseval(self):
        """One-sided spectrum energy matches windowed-frame energy within 1%."""
        wave = noise(0.5, seed=5)
        spec = stft(wave, FFT, HOP).frames
        w = hann_window(FFT)
        for t in range(spec.shape[0] - 1):
            frame = wave.samples[t * HOP : t * HOP + FFT] * w
            bins = np.abs(spec[t]) ** 2
            energy = (bins[0] + bins[-1] + 2 * bins[1:-1].sum()) / FFT
            assert energy == pytest.approx(np.sum(frame**2), rel=0.01)

    def test_polar_round_trip(self):
        """to_polar / from_polar reproduce the spectrogram and wrap phase to (-pi, pi]."""
        spec = stft(noise(0.2, seed=6), FFT, HOP)
        magnitude, phase = to_polar(spec)
        assert np.all(phase.frames > -np.pi) and np.all(phase.frames <= np.pi)
        rebuilt = from_polar(magnitude, phase, FFT, HOP)
        np.testing.assert_allclose(rebuilt.frames, spec.frames, atol=1e-12)

    def test_wrap_phase(self):
        """In-range values are untouched; -pi maps to pi."""
        values = np.array([0.3, -np.pi, 3 * np.pi / 2, -2.5])
        wrapped = wrap_phase(values)
        assert wrapped[0] == 0.3 and wrapped[3] == -2.5
        assert wrapped[1] == pytest.approx(np.pi)
        assert wrapped[2] == pytest.approx(-np.pi / 2)


class TestStreaming:
    """Single-frame push variants."""

    def setup_method(self):
        """Fresh stream state."""
        self.state = StreamState(FFT, HOP)

    def test_first_frame_after_two_pushes(self):
        """The first frame appears once 1536 samples are buffered."""
        assert stft_frame_push(self.state, np.zeros(HOP)) is None
        frame = stft_frame_push(self.state, np.zeros(HOP))
        assert frame is not None and frame.shape == (769,)

    def test_zeros_in_zeros_out(self):
        """Zero input gives zero frames and zero output."""
        for _ in range(6):
            frame = stft_frame_push(self.state, np.zeros(HOP))
            if frame is not None:
                assert not np.any(frame)
                assert not np.any(istft_frame_push(self.state, frame))

    def test_hop_mismatch(self):
        """Blocks of the wrong size are rejected."""
        with pytest.raises(HopSizeMismatchError):
            stft_frame_push(self.state, np.zeros(HOP - 1))

    def test_matches_offline(self):
        """Frame-by-frame analysis and synthesis equal the offline transforms."""
        wave = noise(1.0, seed=7)
        n_hops = len(wave) // HOP
        samples = wave.samples[: n_hops * HOP]
        offline_spec = stft(Waveform(samples), FFT, HOP)
        offline = istft(offline_spec).samples

        frames, out = [], []
        for k in range(n_hops):
            frame = stft_frame_push(self.state, samples[k * HOP : (k + 1) * HOP])
            if frame is not None:
                frames.append(frame)
                out.append(istft_frame_push(self.state, frame))
        np.testing.assert_allclose(np.array(frames), offline_spec.frames, atol=1e-9)
        streamed = np.concatenate(out)
        np.testing.assert_allclose(streamed, offline[: len(streamed)], atol=1e-6)

    def test_reset(self):
        """reset() clears buffered samples so the next frame needs two pushes again."""
        stft_frame_push(self.state, np.ones(HOP))
        stft_frame_push(self.state, np.ones(HOP))
        self.state.reset()
        assert self.state.samples_seen == 0
        assert stft_frame_push(self.state, np.ones(HOP)) is None
