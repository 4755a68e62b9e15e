# tests/test_evaluation.py

import numpy as np
import pytest

from wiener_lab.constants import Compressor, LookaheadScheme, Scheme
from wiener_lab.errors import ParameterError, SimulationError
from wiener_lab.evaluation.decomposition import distortion_decomposition, mc_decomposition
from wiener_lab.evaluation.harness import (
    mc_mse,
    run_replications,
    seed_streams,
    soi_bit_rate,
    summarize,
)
from wiener_lab.evaluation.variants import delayed_channel_mse, lookahead_mse
from wiener_lab.idrf.closed_forms import soi_shift_distortion
from wiener_lab.types import ReconstructionTrace, SampleEvent, SeedStream, WienerPath

BINS = 1024
MASTER_SEED = 7


def _within(estimate: float, expected: float, stderr: float, rel: float = 0.03) -> bool:
    return abs(estimate - expected) <= rel * abs(expected) + 3.0 * stderr


def _fails_on_odd(seed: SeedStream) -> int:
    if seed.stream_index % 2:
        raise RuntimeError("odd stream")
    return seed.stream_index


def _stream_index(seed: SeedStream) -> int:
    return seed.stream_index


class TestHarness:
    """Seeding, execution and summaries"""

    def test_seed_streams_are_indexed(self):
        seeds = seed_streams(MASTER_SEED, 4)
        assert [s.stream_index for s in seeds] == [0, 1, 2, 3]
        assert all(s.master_seed == MASTER_SEED for s in seeds)

    def test_rejects_single_replication(self):
        with pytest.raises(ParameterError, match="at least 2"):
            seed_streams(MASTER_SEED, 1)

    def test_rejects_shared_stream_indices(self):
        with pytest.raises(ParameterError, match="distinct"):
            seed_streams(MASTER_SEED, 2, stream_indices=[5, 5])

    def test_results_keep_seed_order(self):
        seeds = seed_streams(MASTER_SEED, 6)
        assert run_replications(_stream_index, seeds, jobs=1) == list(range(6))

    def test_rejects_zero_jobs(self):
        with pytest.raises(ParameterError, match="jobs"):
            run_replications(_stream_index, seed_streams(MASTER_SEED, 2), jobs=0)

    def test_failures_are_collected(self):
        with pytest.raises(SimulationError) as info:
            run_replications(_fails_on_odd, seed_streams(MASTER_SEED, 5), jobs=1)
        assert info.value.failed == [1, 3]

    def test_summarize(self):
        mean, stderr, ci = summarize([1.0, 2.0, 3.0, 4.0])
        assert mean == pytest.approx(2.5)
        assert stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
        assert ci == pytest.approx(1.959964 * stderr, rel=1e-6)

    def test_rejects_short_horizon(self):
        with pytest.raises(ParameterError, match="100/R"):
            mc_mse(Scheme.SOI, 1.0, 50.0, 10, MASTER_SEED)


class TestTrackingMse:
    """Monte Carlo MSE against the closed forms"""

    @pytest.mark.parametrize("R", [1.0, 5.0])
    def test_soi_matches_one_over_six_r(self, R):
        point = mc_mse(Scheme.SOI, R, 1000.0 / R, 40, MASTER_SEED)
        assert point.method == "soi"
        assert _within(point.mse, 1 / (6 * R), point.stderr)

    def test_test_channel_matches_deterministic_limit(self):
        point = mc_mse(Scheme.UNIFORM_TEST_CHANNEL, 1.0, 200.0, 100, MASTER_SEED)
        assert _within(point.mse, 5 / 6, point.stderr)

    def test_greedy_lloyd_sits_between_bounds(self):
        point = mc_mse(Scheme.UNIFORM_LLOYD, 1.0, 100.0, 100, MASTER_SEED, bins=BINS)
        assert point.mse >= 5 / 6 - 3 * point.stderr
        assert point.mse <= 1.4 * 5 / 6 + 3 * point.stderr
        assert point.mse - 1 / 6 > 3 * point.stderr

    def test_worker_count_does_not_change_results(self):
        serial = mc_mse(Scheme.SOI, 1.0, 100.0, 4, MASTER_SEED, jobs=1)
        parallel = mc_mse(Scheme.SOI, 1.0, 100.0, 4, MASTER_SEED, jobs=2)
        assert serial == parallel

    def test_soi_bit_rate(self):
        rate, interval = soi_bit_rate(2.0, 1000.0, 10, MASTER_SEED)
        assert rate == pytest.approx(2.0, rel=0.02)
        assert interval == pytest.approx(0.5, rel=0.02)

    def test_uniform_rejects_misaligned_step(self):
        with pytest.raises(ParameterError, match="not a multiple"):
            mc_mse(Scheme.UNIFORM_TEST_CHANNEL, 1.0, 200.0, 5, MASTER_SEED, step_h=0.0007)

    @pytest.mark.slow
    def test_halving_the_step_moves_soi_mse_by_under_one_percent(self):
        """Default grid with the bridge correction is converged"""
        coarse = mc_mse(Scheme.SOI, 1.0, 1000.0, 60, MASTER_SEED)
        fine = mc_mse(Scheme.SOI, 1.0, 1000.0, 60, MASTER_SEED, step_h=5e-4)
        noise = 3.0 * float(np.hypot(coarse.stderr, fine.stderr))
        assert abs(coarse.mse - fine.mse) <= 0.01 * fine.mse + noise
        assert _within(coarse.mse, 1 / 6, coarse.stderr)


class TestDecomposition:
    """Sampling, quantization and cross terms"""

    def test_stub_decomposition(self):
        path = WienerPath(step_h=0.5, values=[0.0, 1.0, 2.0, 1.0])
        events = [SampleEvent(index=1, step=2, time=1.0, value=2.0)]
        trace = ReconstructionTrace(times=[0.0, 1.0], levels=[0.0, 1.5])
        report = distortion_decomposition(path, events, trace)
        # grid points 0..2: W = 0, 1, 2 against sampled 0, 0, 2 and estimates 0, 0, 1.5
        assert report.sampling_term == pytest.approx(1 / 3)
        assert report.quantization_term == pytest.approx(0.25 / 3)
        assert report.total == pytest.approx((1 + 0.25) / 3)
        assert report.cross_term == pytest.approx(0.0, abs=1e-12)

    def test_soi_has_no_quantization_error(self):
        reports = mc_decomposition(Scheme.SOI, 1.0, 100.0, 5, MASTER_SEED)
        assert all(r.quantization_term == 0.0 for r in reports)
        assert all(r.cross_term == 0.0 for r in reports)

    def test_greedy_terms(self):
        reports = mc_decomposition(Scheme.UNIFORM_LLOYD, 1.0, 100.0, 100, MASTER_SEED, bins=BINS)
        sampling, sampling_se, _ = summarize([r.sampling_term for r in reports])
        cross, cross_se, _ = summarize([r.cross_term for r in reports])
        assert _within(sampling, 0.5, sampling_se)
        assert abs(cross) <= 4 * cross_se + 1e-12
        assert all(r.quantization_term > 0 for r in reports)


class TestVariants:
    """Look-ahead decoders and the delayed channel"""

    def test_soi_midpoint(self):
        """The midpoint shift overshoots the conditional mean: 1/(4R)"""
        point = lookahead_mse(LookaheadScheme.SOI_MIDPOINT, 1.0, 1000.0, 30, MASTER_SEED)
        assert soi_shift_distortion(1.0, 0.5) == pytest.approx(0.25)
        assert _within(point.mse, 0.25, point.stderr)

    def test_soi_midpoint_is_worse_than_hold(self):
        midpoint = lookahead_mse(LookaheadScheme.SOI_MIDPOINT, 1.0, 1000.0, 30, MASTER_SEED)
        hold = mc_mse(Scheme.SOI, 1.0, 1000.0, 30, MASTER_SEED)
        assert midpoint.mse - hold.mse > 3 * (midpoint.stderr + hold.stderr)

    def test_soi_sign_mean_beats_hold(self):
        """Shifting by beta/6 toward the next sample gives 5/(36R)"""
        shifted = lookahead_mse(LookaheadScheme.SOI_SIGN_MEAN, 2.0, 500.0, 30, MASTER_SEED)
        hold = mc_mse(Scheme.SOI, 2.0, 500.0, 30, MASTER_SEED)
        assert shifted.method == "soi_sign_mean"
        assert _within(shifted.mse, 5 / 72, shifted.stderr)
        assert shifted.mse < hold.mse

    def test_uniform_interpolation_rejects_misaligned_step(self):
        with pytest.raises(ParameterError, match="not a multiple"):
            lookahead_mse(LookaheadScheme.UNIFORM_INTERPOLATION, 1.0, 200.0, 5, MASTER_SEED, step_h=0.0007,
                          compressor=Compressor.NONE)

    def test_uniform_interpolation_of_true_samples(self):
        point = lookahead_mse(LookaheadScheme.UNIFORM_INTERPOLATION, 1.0, 200.0, 30, MASTER_SEED,
                              compressor=Compressor.NONE)
        assert point.method == "uniform_interpolation[none]"
        assert _within(point.mse, 1 / 6, point.stderr)

    def test_uniform_interpolation_of_test_channel(self):
        point = lookahead_mse(LookaheadScheme.UNIFORM_INTERPOLATION, 1.0, 200.0, 30, MASTER_SEED,
                              compressor=Compressor.TEST_CHANNEL)
        assert point.mse <= 0.5 + 3 * point.stderr
        assert point.mse > 1 / 6

    def test_zero_delay_is_causal_soi(self):
        delayed = delayed_channel_mse(1.0, 0.0, 200.0, 5, MASTER_SEED)
        causal = mc_mse(Scheme.SOI, 1.0, 200.0, 5, MASTER_SEED)
        assert np.isclose(delayed.mse, causal.mse, rtol=1e-9)

    def test_delay_adds_linearly(self):
        short = delayed_channel_mse(1.0, 0.2, 200.0, 30, MASTER_SEED)
        long = delayed_channel_mse(1.0, 0.7, 200.0, 30, MASTER_SEED)
        assert _within(short.mse, 1 / 6 + 0.2, short.stderr)
        assert _within(long.mse - short.mse, 0.5, short.stderr + long.stderr, rel=0.05)
        assert long.method == "soi_delay[0.7]"

    def test_rejects_negative_delay(self):
        with pytest.raises(ParameterError, match="non-negative"):
            delayed_channel_mse(1.0, -0.1, 200.0, 5, MASTER_SEED)
