"""Unit tests for evaluation helpers and report formatting."""

import json

import numpy as np
import pytest

from app.core.errors import UsageError
from app.core.types import Waveform
from app.dsp.bandwidth import fluctuate, lowpass
from app.metrics.evaluation import (
    bandwidth_sweep,
    evaluate_pair,
    format_report,
    parse_metrics,
    segment_report,
)
from tests.helpers import noise


class IdentityModel:
    """Stand-in extender that returns its input."""

    def process(self, wave: Waveform) -> Waveform:
        return wave


class TestEvaluatePair:
    """Metric selection and evaluation."""

    def setup_method(self):
        """Set up test data."""
        self.clean = noise(1.0, seed=0)
        self.degraded = lowpass(self.clean, 4000.0)

    def test_default_metrics(self):
        """All four metrics are computed by default, in order."""
        results = evaluate_pair(self.clean, self.degraded)
        assert list(results) == ["lsd", "segsnr", "mrstft", "wav"]
        assert results["lsd"] > 0 and results["wav"] > 0

    def test_identity(self):
        """A clean copy scores perfectly."""
        results = evaluate_pair(self.clean, self.clean, "lsd,segsnr")
        assert results == {"lsd": 0.0, "segsnr": 35.0}

    def test_parse(self):
        """Comma lists are split and trimmed."""
        assert parse_metrics(" lsd , wav ") == ["lsd", "wav"]
        assert parse_metrics(["segsnr"]) == ["segsnr"]

    def test_unknown_metric(self):
        """Unknown metric names are a usage error."""
        with pytest.raises(UsageError, match="pesq"):
            parse_metrics("lsd,pesq")

    def test_empty_metric_list(self):
        """An empty selection is a usage error."""
        with pytest.raises(UsageError):
            parse_metrics("")


class TestSweep:
    """Fixed-cutoff sweep."""

    def test_identity_model(self):
        """With a pass-through model, output scores equal input scores."""
        clean = noise(1.0, seed=1)
        table = bandwidth_sweep(IdentityModel(), clean, [4000.0, 12000.0])
        assert list(table.columns) == [
            "cutoff_hz",
            "input_bandwidth_hz",
            "output_bandwidth_hz",
            "input_lsd",
            "output_lsd",
            "input_segsnr",
            "output_segsnr",
        ]
        assert len(table) == 2
        np.testing.assert_allclose(table["input_lsd"], table["output_lsd"])
        assert table["input_lsd"].iloc[0] > table["input_lsd"].iloc[1]
        assert abs(table["input_bandwidth_hz"].iloc[0] - 4000.0) <= 250


class TestSegmentReport:
    """Per-segment scoring of fluctuating degradations."""

    def test_rows_follow_schedule(self):
        """One row per segment with its bounds and cutoff."""
        clean = noise(2.0, seed=2)
        schedule = [(0.0, 4000.0), (1.0, 16000.0)]
        table = segment_report(clean, fluctuate(clean, schedule), schedule)
        assert list(table["cutoff_hz"]) == [4000.0, 16000.0]
        assert list(table["start_s"]) == [0.0, 1.0]
        assert list(table["end_s"]) == [1.0, 2.0]
        assert table["lsd"].iloc[0] > table["lsd"].iloc[1]


class TestFormatReport:
    """Text and JSON rendering."""

    def setup_method(self):
        """Set up test data."""
        self.results = {"variant": "lite", "params": 535174, "lsd": 1.25}

    def test_text(self):
        """key=value lines with six-decimal floats."""
        assert format_report(self.results, "text") == "variant=lite\nparams=535174\nlsd=1.250000"

    def test_json(self):
        """JSON output parses back to the same mapping."""
        assert json.loads(format_report(self.results, "json")) == self.results

    def test_unknown_format(self):
        """Other formats are a usage error."""
        with pytest.raises(UsageError):
            format_report(self.results, "xml")
