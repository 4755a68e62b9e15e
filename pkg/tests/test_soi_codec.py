# tests/test_soi_codec.py

import numpy as np
import pytest

from wiener_lab.codecs.soi import (
    codewords_from_csv,
    codewords_to_csv,
    run_soi,
    soi_analytic_distortion,
    soi_decode,
    soi_encode,
)
from wiener_lab.errors import InputError, ParameterError
from wiener_lab.stochastic.core import ArraySegmentSource, WienerSegmentSource
from wiener_lab.types import CodewordRecord, SeedStream, SoiConfig, WienerPath

SEED = SeedStream(master_seed=7, stream_index=0)

# Innovations +1, -1, +1 at steps 2, 4, 6, then an open tail
STUB_VALUES = [0.0, 0.5, 1.0, 0.5, 0.0, 0.6, 1.0, 1.2]


def _record(time: float, bit: str) -> CodewordRecord:
    return CodewordRecord(time=time, bits=bit, length=1)


class TestSoiEncoder:
    """Threshold sampler and sign compressor"""

    def setup_method(self):
        self.config = SoiConfig(rate_R=1.0)
        self.path = WienerPath(step_h=0.1, values=STUB_VALUES)

    def test_stub_path_bits(self):
        events = list(soi_encode(ArraySegmentSource(self.path, 1.0), self.config, self.path.horizon))
        assert [codeword.bits for _, codeword in events] == ["1", "0", "1"]
        assert [sample.step for sample, _ in events] == [2, 4, 6]
        assert [sample.value for sample, _ in events] == [1.0, 0.0, 1.0]
        assert [sample.index for sample, _ in events] == [1, 2, 3]

    def test_zero_horizon_emits_nothing(self):
        source = WienerSegmentSource(1.0, 1e-3, 1.0, SEED)
        assert list(soi_encode(source, self.config, 0.0)) == []

    def test_negative_horizon(self):
        with pytest.raises(ParameterError, match="horizon"):
            list(soi_encode(ArraySegmentSource(self.path, 1.0), self.config, -1.0))

    def test_bit_rate_matches_sample_rate(self):
        """One bit per sample"""
        run = run_soi(self.config, 50.0, SEED)
        assert run.bits == run.samples
        assert [c.length for c in run.codewords] == [1] * run.bits


class TestSoiDecoder:
    """Accumulate-and-hold reconstruction"""

    def test_two_codeword_example(self):
        trace = soi_decode([_record(0.5, "1"), _record(1.4, "0")], beta=1.0)
        assert np.allclose(trace.level_at([0.2, 0.5, 1.0, 1.4, 3.0]), [0.0, 1.0, 1.0, 0.0, 0.0])

    def test_empty_sequence_is_constant_zero(self):
        trace = soi_decode([], beta=0.5)
        assert np.all(trace.level_at([0.0, 10.0, 1e6]) == 0.0)

    def test_rejects_decreasing_times(self):
        with pytest.raises(InputError, match="non-decreasing"):
            soi_decode([_record(1.0, "1"), _record(0.5, "0")], beta=1.0)

    def test_rejects_multi_bit_codewords(self):
        with pytest.raises(InputError, match="1 bit"):
            soi_decode([CodewordRecord(time=0.1, bits="10", length=2)], beta=1.0)


class TestSoiRoundTrip:
    """Encoder and decoder agree exactly at sample times"""

    def setup_method(self):
        self.config = SoiConfig(rate_R=2.0)
        self.run = run_soi(self.config, 60.0, SEED, keep_path=True)
        self.trace = soi_decode(self.run.codewords, self.config.threshold)

    def test_reconstruction_is_exact_at_samples(self):
        assert self.run.samples > 0
        for event in self.run.events:
            assert self.trace.level_at(event.time) == event.value
            assert self.run.path.values[event.step] == event.value

    def test_error_stays_inside_the_threshold(self):
        path = self.run.path
        error = path.values[:-1] - self.trace.level_at(path.times[:-1])
        assert np.max(np.abs(error)) < self.config.threshold + 1e-9

    def test_mse_matches_path_average(self):
        path = self.run.path
        error = path.values[:-1] - self.trace.level_at(path.times[:-1])
        assert self.run.mse == pytest.approx(float(np.mean(error * error)), rel=1e-9)


class TestSoiAnalytic:
    """Closed-form SOI distortion"""

    def test_values(self):
        assert soi_analytic_distortion(1.0) == pytest.approx(1 / 6)
        assert soi_analytic_distortion(2.0) == pytest.approx(1 / 12)

    def test_rejects_non_positive_rate(self):
        with pytest.raises(ParameterError, match="rate"):
            soi_analytic_distortion(0.0)


class TestCodewordCsv:
    """time,bit serialization"""

    def test_round_trip(self):
        records = [_record(0.25, "1"), _record(1.125, "0")]
        text = codewords_to_csv(records)
        assert text.splitlines()[0] == "time,bit"
        assert codewords_from_csv(text) == records

    def test_rejects_missing_header(self):
        with pytest.raises(InputError, match="header"):
            codewords_from_csv("0.5,1\n")

    def test_rejects_bad_bits(self):
        with pytest.raises(InputError, match="malformed"):
            codewords_from_csv("time,bit\n0.5,2\n")
