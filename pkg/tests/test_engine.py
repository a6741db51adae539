"""Unit tests for the sample-synchronous streaming engine."""

import io
import tracemalloc

import numpy as np
import pytest

from app.audio.io import read_raw, to_raw
from app.core.errors import UsageError
from app.core.schemas import ModelConfig
from app.model.engine import StreamingExtender, stream_raw
from app.model.graph import BaeNet
from app.model.weights import ModelWeights, generate_test_weights
from tests.helpers import noise, tiny_config


class TestStreamingExtender:
    """Push interface and latency."""

    def setup_method(self):
        """Set up test data."""
        self.net = BaeNet(generate_test_weights(ModelConfig(variant="lite"), 1))
        self.extender = StreamingExtender(self.net)

    def test_latency(self):
        """Latency is two frames minus two hops: 1536 samples, 32 ms."""
        assert self.extender.latency == 1536
        assert 1000 * self.extender.latency / 48000 == 32.0

    def test_equal_length_output(self):
        """Every push returns exactly as many samples as it received."""
        rng = np.random.default_rng(0)
        for size in (0, 1, 100, 767, 768, 769, 5000):
            out = self.extender.push(rng.normal(0, 0.1, size))
            assert out.shape == (size,)

    def test_empty_input(self):
        """An empty push is a no-op."""
        assert self.extender.push(np.zeros(0)).size == 0
        assert self.extender.buffered_samples == 1536

    def test_leading_silence(self):
        """The first latency samples are zeros."""
        out = self.extender.push(noise(0.1, seed=1).samples)
        assert not np.any(out[:1536])

    def test_matches_offline_process(self):
        """Streamed output equals offline processing delayed by the latency."""
        wave = noise(2.0, seed=3)
        offline = self.net.process(wave).samples
        rng = np.random.default_rng(4)
        chunks, offset = [], 0
        while offset < len(wave):
            size = int(rng.integers(1, 2000))
            chunks.append(self.extender.push(wave.samples[offset : offset + size]))
            offset += size
        streamed = np.concatenate(chunks)
        assert len(streamed) == len(wave)
        n = len(wave) - 1536 - 768
        np.testing.assert_allclose(streamed[1536 : 1536 + n], offline[:n], atol=1e-6)

    def test_chunking_invariance(self):
        """Output does not depend on how the input is split."""
        samples = noise(0.5, seed=5).samples
        whole = self.extender.push(samples)
        self.extender.reset()
        pieces = np.concatenate([self.extender.push(c) for c in np.array_split(samples, 37)])
        np.testing.assert_allclose(pieces, whole, atol=1e-12)

    def test_reset(self):
        """reset() returns the engine to its initial state."""
        samples = noise(0.2, seed=6).samples
        first = self.extender.push(samples)
        self.extender.push(noise(0.3, seed=7).samples)
        self.extender.reset()
        np.testing.assert_array_equal(self.extender.push(samples), first)


class TestBoundedMemory:
    """Long streams do not grow state."""

    def test_sixty_seconds(self):
        """Buffered samples and traced memory stay flat over 60 s of input."""
        extender = StreamingExtender(BaeNet(ModelWeights.zeros(ModelConfig(variant="lite"))))
        rng = np.random.default_rng(0)
        block = 4800
        tracemalloc.start()
        try:
            baseline = None
            for second in range(60):
                for _ in range(10):
                    extender.push(rng.normal(0, 0.1, block))
                    assert extender.buffered_samples < 1536 + 768
                if second == 5:
                    baseline = tracemalloc.get_traced_memory()[0]
            growth = tracemalloc.get_traced_memory()[0] - baseline
        finally:
            tracemalloc.stop()
        assert growth < 1_000_000


class TestRawStream:
    """Byte-level stdin/stdout pump."""

    def setup_method(self):
        """Set up test data."""
        self.extender = StreamingExtender(BaeNet(generate_test_weights(tiny_config("lite"), 2)))

    def test_empty(self):
        """Empty input writes nothing."""
        dst = io.BytesIO()
        assert stream_raw(self.extender, io.BytesIO(b""), dst) == 0
        assert dst.getvalue() == b""

    def test_byte_count_preserved(self):
        """As many float32 samples come out as went in."""
        samples = noise(0.01, seed=1).samples
        dst = io.BytesIO()
        written = stream_raw(self.extender, io.BytesIO(to_raw(samples)), dst, chunk_samples=37)
        assert written == len(samples)
        assert len(read_raw(dst.getvalue())) == len(samples)

    def test_partial_sample_dropped(self):
        """A trailing partial sample is discarded."""
        dst = io.BytesIO()
        written = stream_raw(self.extender, io.BytesIO(to_raw(np.zeros(10)) + b"\x00\x01"), dst, 3)
        assert written == 10

    @pytest.mark.parametrize("chunk", [0, -768])
    def test_non_positive_chunk(self, chunk):
        """A chunk size below one sample is rejected before any input is consumed."""
        src = io.BytesIO(to_raw(np.zeros(100)))
        with pytest.raises(UsageError):
            stream_raw(self.extender, src, io.BytesIO(), chunk)
        assert src.tell() == 0
