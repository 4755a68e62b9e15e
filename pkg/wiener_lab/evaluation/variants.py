#!/usr/bin/env python3
"""
Wiener Lab - Decoder Variants
One-sample look-ahead decoders (SOI sign shifts, uniform interpolation) and
the SOI decoder behind a channel with a fixed delay.
"""

import logging
from collections import deque
from functools import partial
from typing import Optional

import numpy as np

from wiener_lab.config import DEFAULT_JOBS, PDF_BINS
from wiener_lab.constants import SOI_LOOKAHEAD_SHIFTS, Compressor, LookaheadScheme
from wiener_lab.errors import ParameterError
from wiener_lab.codecs.soi import soi_stream
from wiener_lab.codecs.uniform import (
    check_uniform_step,
    default_uniform_step,
    design_schedule,
    greedy_lloyd_encode,
    samples_per_interval,
    test_channel_encode,
)
from wiener_lab.evaluation.harness import check_horizon, run_replications, seed_streams, summarize
from wiener_lab.stochastic.core import WienerSegmentSource, default_threshold_step, generate_path
from wiener_lab.types import RateDistortionPoint, SeedStream, SoiConfig, UniformConfig

logger = logging.getLogger(__name__)

# ==================== Look-ahead ====================

def soi_shift_mse(rate_R: float, shift: float, horizon: float, step_h: float, bridge: bool,
                  seed: SeedStream) -> float:
    """
    Each completed interval is re-estimated as the previous level plus
    sign*shift*beta once its codeword is known, i.e. the error is
    e - sign*shift*beta; the open tail keeps the causal estimate.
    """
    config = SoiConfig(rate_R=rate_R)
    beta = config.threshold
    source = WienerSegmentSource(beta, step_h, horizon, seed, bridge=bridge)
    sq_error = 0.0
    for step in soi_stream(source, config, horizon):
        segment = step.segment
        e = segment.values[:segment.event.exit_step]
        if step.sample is not None:
            e = e - segment.event.sign * shift * beta
        sq_error += float(np.dot(e, e))
    return sq_error / source.total_steps


def uniform_interpolation_mse(rate_R: float, bits_per_sample: int, horizon: float, step_h: float,
                              compressor: str, design, seed: SeedStream) -> float:
    """Linear interpolation between reconstructed samples; hold after the last one."""
    config = UniformConfig(rate_R=rate_R, bits_per_sample=bits_per_sample)
    path = generate_path(horizon, step_h, seed)
    steps = samples_per_interval(path, config)
    n_samples = (path.values.size - 1) // steps
    sample_steps = steps * np.arange(n_samples + 1)

    if compressor == Compressor.NONE.value:
        levels = path.values[sample_steps]
    elif compressor == Compressor.TEST_CHANNEL.value:
        levels = test_channel_encode(path, config, seed.channel_generator())[0].levels
    else:
        levels = greedy_lloyd_encode(path, config, design)[0].levels

    k = np.arange(path.values.size - 1)
    estimate = np.interp(k, sample_steps, levels)
    error = path.values[:-1] - estimate
    return float(np.mean(error * error))


def lookahead_mse(scheme: LookaheadScheme, R: float, horizon: float, reps: int, master_seed: int,
                  step_h: Optional[float] = None, *, compressor: Compressor = Compressor.LLOYD_MAX,
                  bits_per_sample: int = 1, bridge: bool = True, jobs: int = DEFAULT_JOBS,
                  bins: int = PDF_BINS) -> RateDistortionPoint:
    """
    MSE of a one-sample look-ahead decoder.

    For uniform_interpolation, `compressor` selects what is interpolated:
    the true samples (none), the test-channel reconstruction or the greedy
    Lloyd-Max reconstruction.
    """
    scheme = LookaheadScheme(scheme)
    check_horizon(R, horizon)
    seeds = seed_streams(master_seed, reps)

    if scheme in SOI_LOOKAHEAD_SHIFTS:
        step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
        task = partial(soi_shift_mse, R, SOI_LOOKAHEAD_SHIFTS[scheme], horizon, step_h, bridge)
        method, f, Rs = scheme.value, R, 1
    else:
        compressor = Compressor(compressor)
        config = UniformConfig(rate_R=R, bits_per_sample=bits_per_sample)
        step_h = step_h or default_uniform_step(config)
        check_uniform_step(config, step_h)
        design = design_schedule(R, bits_per_sample, bins=bins) if compressor == Compressor.LLOYD_MAX else None
        task = partial(uniform_interpolation_mse, R, bits_per_sample, horizon, step_h, compressor.value, design)
        method, f, Rs = f"{scheme.value}[{compressor.value}]", config.frequency, bits_per_sample

    mse, stderr, ci = summarize(run_replications(task, seeds, jobs))
    logger.info(f"✅ {method} R={R}: mse={mse:.6g} ± {ci:.2g}")
    return RateDistortionPoint(method=method, R=R, f=f, Rs=Rs, mse=mse, ci_halfwidth=ci,
                               stderr=stderr, reps=reps, horizon=horizon)

# ==================== Fixed Channel Delay ====================

def delayed_soi_mse(rate_R: float, delay: float, horizon: float, step_h: float, bridge: bool,
                    seed: SeedStream) -> float:
    """
    SOI tracking where codeword i reaches the decoder delay seconds after
    tau_i; the decoder holds the last delivered level.
    """
    config = SoiConfig(rate_R=rate_R)
    lag = int(round(delay / step_h))
    source = WienerSegmentSource(config.threshold, step_h, horizon, seed, bridge=bridge)
    pending = deque()
    delivered = 0.0
    sq_error = 0.0

    for step in soi_stream(source, config, horizon):
        segment = step.segment
        length = segment.event.exit_step
        first, last = segment.start_step, segment.start_step + length - 1
        truth = step.level_before + segment.values[:length]

        if pending and pending[0][0] <= last:
            apply_at = np.array([p[0] for p in pending])
            values = np.array([p[1] for p in pending])
            k = np.arange(first, last + 1)
            index = np.searchsorted(apply_at, k, side="right") - 1
            decoded = np.where(index >= 0, values[np.clip(index, 0, None)], delivered)
            while pending and pending[0][0] <= last:
                delivered = pending.popleft()[1]
        else:
            decoded = delivered

        error = truth - decoded
        sq_error += float(np.dot(error, error))
        if step.sample is not None:
            pending.append((step.sample.step + lag, step.sample.value))

    return sq_error / source.total_steps


def delayed_channel_mse(R: float, delta: float, horizon: float, reps: int, master_seed: int,
                        step_h: Optional[float] = None, *, bridge: bool = True,
                        jobs: int = DEFAULT_JOBS) -> RateDistortionPoint:
    """MSE of the SOI code when every codeword is delivered delta seconds late."""
    if delta < 0:
        raise ParameterError(f"delay must be non-negative, got {delta}")
    check_horizon(R, horizon)
    step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
    task = partial(delayed_soi_mse, R, delta, horizon, step_h, bridge)
    mse, stderr, ci = summarize(run_replications(task, seed_streams(master_seed, reps), jobs))
    logger.info(f"✅ soi_delay R={R} delta={delta}: mse={mse:.6g} ± {ci:.2g}")
    return RateDistortionPoint(method=f"soi_delay[{delta:g}]", R=R, f=R, Rs=1, mse=mse,
                               ci_halfwidth=ci, stderr=stderr, reps=reps, horizon=horizon)


__all__ = [
    "soi_shift_mse",
    "uniform_interpolation_mse",
    "lookahead_mse",
    "delayed_soi_mse",
    "delayed_channel_mse",
]
