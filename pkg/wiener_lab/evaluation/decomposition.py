# wiener_lab/evaluation/decomposition.py

import logging
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from wiener_lab.config import DEFAULT_JOBS, PDF_BINS
from wiener_lab.constants import Scheme
from wiener_lab.errors import InputError
from wiener_lab.codecs.soi import run_soi, soi_decode
from wiener_lab.codecs.uniform import default_uniform_step, design_schedule, greedy_lloyd_encode, test_channel_encode
from wiener_lab.evaluation.harness import check_horizon, run_replications, seed_streams
from wiener_lab.stochastic.core import default_threshold_step, generate_path
from wiener_lab.types import DecompositionReport, ReconstructionTrace, SampleEvent, SeedStream, SoiConfig, UniformConfig, WienerPath

logger = logging.getLogger(__name__)


def sample_events_from_trace(path: WienerPath, trace: ReconstructionTrace) -> List[SampleEvent]:
    """Sample events at the trace breakpoints (after the initial one)."""
    events = []
    for index, time in enumerate(trace.times[1:], start=1):
        step = int(round(time / path.step_h))
        events.append(SampleEvent(index=index, step=step, time=float(time), value=float(path.values[step])))
    return events


def distortion_decomposition(path: WienerPath, events: Sequence[SampleEvent],
                             trace: ReconstructionTrace) -> DecompositionReport:
    """
    Split the time-averaged squared error into a sampling term
    (W_t - W_tau)^2, a quantization term (W_tau - What_tau)^2 held over each
    interval, and the cross term that remains. Terms are per second over
    grid points 0..K-1; tau_0 = 0 with W_0 = What_0 = 0.
    """
    K = path.values.size - 1
    if K < 1:
        raise InputError("path needs at least one grid step")
    steps = np.array([0] + [event.step for event in events], dtype=int)
    if np.any(np.diff(steps) < 0) or steps[-1] > K:
        raise InputError("sample steps must be non-decreasing and inside the path")

    sampled = path.values[steps]
    reconstructed = np.concatenate(([0.0], trace.level_at([event.time for event in events])))
    k = np.arange(K)
    current = np.searchsorted(steps, k, side="right") - 1

    W = path.values[:K]
    sampling = W - sampled[current]
    quantization = sampled[current] - reconstructed[current]
    error = W - reconstructed[current]

    sampling_term = float(np.mean(sampling * sampling))
    quantization_term = float(np.mean(quantization * quantization))
    total = float(np.mean(error * error))
    return DecompositionReport(
        sampling_term=sampling_term,
        quantization_term=quantization_term,
        cross_term=total - sampling_term - quantization_term,
        total=total,
    )

# ==================== Replications ====================

def _soi_decomposition(rate_R: float, horizon: float, step_h: float, seed: SeedStream) -> DecompositionReport:
    config = SoiConfig(rate_R=rate_R)
    run = run_soi(config, horizon, seed, step_h, keep_path=True)
    trace = soi_decode(run.codewords, config.threshold)
    return distortion_decomposition(run.path, run.events, trace)


def _uniform_decomposition(rate_R: float, bits_per_sample: int, horizon: float, step_h: float,
                           compressor: str, design, seed: SeedStream) -> DecompositionReport:
    config = UniformConfig(rate_R=rate_R, bits_per_sample=bits_per_sample)
    path = generate_path(horizon, step_h, seed)
    if compressor == "test_channel":
        trace, _ = test_channel_encode(path, config, seed.channel_generator())
    else:
        trace, _, _ = greedy_lloyd_encode(path, config, design)
    return distortion_decomposition(path, sample_events_from_trace(path, trace), trace)


def mc_decomposition(scheme: Scheme, R: float, horizon: float, reps: int, master_seed: int,
                     step_h: Optional[float] = None, *, bits_per_sample: int = 1,
                     jobs: int = DEFAULT_JOBS, bins: int = PDF_BINS) -> List[DecompositionReport]:
    """One DecompositionReport per replication, in replication order."""
    scheme = Scheme(scheme)
    check_horizon(R, horizon)
    seeds = seed_streams(master_seed, reps)
    if scheme == Scheme.SOI:
        step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
        task = partial(_soi_decomposition, R, horizon, step_h)
    else:
        config = UniformConfig(rate_R=R, bits_per_sample=bits_per_sample)
        step_h = step_h or default_uniform_step(config)
        compressor = "test_channel" if scheme == Scheme.UNIFORM_TEST_CHANNEL else "lloyd_max"
        design = design_schedule(R, bits_per_sample, bins=bins) if compressor == "lloyd_max" else None
        task = partial(_uniform_decomposition, R, bits_per_sample, horizon, step_h, compressor, design)
    reports = run_replications(task, seeds, jobs)
    logger.info(f"✅ Decomposed {len(reports)} {scheme.value} replications at R={R}")
    return reports


__all__ = ["sample_events_from_trace", "distortion_decomposition", "mc_decomposition"]
