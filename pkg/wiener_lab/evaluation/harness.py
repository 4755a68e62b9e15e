#!/usr/bin/env python3
"""
Wiener Lab - Monte Carlo Harness
Fans replications out over seeded streams, gathers them in replication
order and reduces them to a mean with a normal-approximation interval.
Replication k always uses stream_index k, so results do not depend on
the worker count.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.stats

from wiener_lab.config import DEFAULT_JOBS, PDF_BINS
from wiener_lab.constants import MIN_HEADLINE_REPS, Scheme
from wiener_lab.errors import ParameterError, SimulationError
from wiener_lab.codecs.soi import run_soi, soi_replication_mse
from wiener_lab.codecs.uniform import check_uniform_step, default_uniform_step, design_schedule, uniform_replication_mse
from wiener_lab.stochastic.core import default_threshold_step
from wiener_lab.types import RateDistortionPoint, SeedStream, SoiConfig, UniformConfig

logger = logging.getLogger(__name__)

_Z_95 = float(scipy.stats.norm.ppf(0.975))

# ==================== Seeds ====================

def seed_streams(master_seed: int, reps: int,
                 stream_indices: Optional[Sequence[int]] = None) -> List[SeedStream]:
    """One SeedStream per replication; stream indices default to 0..reps-1."""
    if reps < 2:
        raise ParameterError(f"need at least 2 replications for a confidence interval, got {reps}")
    indices = list(range(reps)) if stream_indices is None else list(stream_indices)
    if len(indices) != reps:
        raise ParameterError(f"{len(indices)} stream indices given for {reps} replications")
    if len(set(indices)) != len(indices):
        raise ParameterError("replications must use distinct stream indices")
    if reps < MIN_HEADLINE_REPS:
        logger.warning(f"⚠️ Only {reps} replications: the normal interval is rough below {MIN_HEADLINE_REPS}")
    return [SeedStream(master_seed=master_seed, stream_index=i) for i in indices]

# ==================== Execution ====================

def _guarded(task: Callable[..., Any], seed: SeedStream) -> Tuple[bool, Any, Optional[str]]:
    try:
        return True, task(seed=seed), None
    except Exception as e:
        return False, None, f"{type(e).__name__}: {e}"


def run_replications(task: Callable[..., Any], seeds: Sequence[SeedStream],
                     jobs: int = DEFAULT_JOBS) -> List[Any]:
    """
    Run task(seed=...) for every seed and return results in seed order.
    Failed replications are collected and raised together.
    """
    if jobs < 1:
        raise ParameterError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1:
        outcomes = [_guarded(task, seed) for seed in seeds]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(partial(_guarded, task), seeds))

    failed = [(seed.stream_index, reason) for seed, (ok, _, reason) in zip(seeds, outcomes) if not ok]
    if failed:
        for index, reason in failed:
            logger.error(f"❌ Replication {index} failed: {reason}")
        raise SimulationError(f"{len(failed)} of {len(seeds)} replications failed",
                              failed=[index for index, _ in failed])
    return [value for _, value, _ in outcomes]


def summarize(values: Sequence[float]) -> Tuple[float, float, float]:
    """(mean, standard error, 95% half-width) over replication values."""
    data = np.asarray(values, dtype=float)
    if data.size < 2:
        raise ParameterError("need at least 2 values to summarize")
    stderr = float(scipy.stats.sem(data))
    return float(np.mean(data)), stderr, _Z_95 * stderr


def check_horizon(R: float, horizon: float) -> None:
    if R <= 0:
        raise ParameterError(f"rate R must be positive, got {R}")
    if horizon < 100.0 / R:
        raise ParameterError(f"horizon {horizon} is shorter than 100/R = {100.0 / R}")

# ==================== MSE Estimation ====================

def mc_mse(scheme: Scheme, R: float, horizon: float, reps: int, master_seed: int,
           step_h: Optional[float] = None, *, bits_per_sample: int = 1, bridge: bool = True,
           jobs: int = DEFAULT_JOBS, stream_indices: Optional[Sequence[int]] = None,
           bins: int = PDF_BINS) -> RateDistortionPoint:
    """
    Monte Carlo estimate of the long-run tracking MSE of one scheme.

    Example:
        >>> point = mc_mse(Scheme.SOI, 1.0, 1000.0, 30, master_seed=7)
        >>> abs(point.mse - 1 / 6) < 0.02
        True
    """
    scheme = Scheme(scheme)
    check_horizon(R, horizon)
    seeds = seed_streams(master_seed, reps, stream_indices)

    if scheme == Scheme.SOI:
        step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
        task = partial(soi_replication_mse, rate_R=R, horizon=horizon, step_h=step_h, bridge=bridge)
        f, Rs = R, 1
    else:
        config = UniformConfig(rate_R=R, bits_per_sample=bits_per_sample)
        step_h = step_h or default_uniform_step(config)
        check_uniform_step(config, step_h)
        compressor = "test_channel" if scheme == Scheme.UNIFORM_TEST_CHANNEL else "lloyd_max"
        design = design_schedule(R, bits_per_sample, bins=bins) if compressor == "lloyd_max" else None
        task = partial(uniform_replication_mse, rate_R=R, bits_per_sample=bits_per_sample,
                       horizon=horizon, step_h=step_h, compressor=compressor, design=design)
        f, Rs = config.frequency, bits_per_sample

    logger.info(f"📝 {scheme.value}: R={R}, horizon={horizon}, reps={reps}, h={step_h:.3g}, jobs={jobs}")
    mse, stderr, ci = summarize(run_replications(task, seeds, jobs))
    logger.info(f"✅ {scheme.value} R={R}: mse={mse:.6g} ± {ci:.2g}")
    return RateDistortionPoint(method=scheme.value, R=R, f=f, Rs=Rs, mse=mse, ci_halfwidth=ci,
                               stderr=stderr, reps=reps, horizon=horizon)

# ==================== Rate Accounting ====================

def _soi_rate_replication(rate_R: float, horizon: float, step_h: float, bridge: bool,
                          seed: SeedStream) -> Tuple[float, float]:
    run = run_soi(SoiConfig(rate_R=rate_R), horizon, seed, step_h, bridge)
    interval = run.horizon / run.samples if run.samples else float("inf")
    return run.bits / run.horizon, interval


def soi_bit_rate(R: float, horizon: float, reps: int, master_seed: int,
                 step_h: Optional[float] = None, *, bridge: bool = True,
                 jobs: int = DEFAULT_JOBS) -> Tuple[float, float]:
    """Empirical (bits per second, mean sampling interval) of the SOI encoder."""
    check_horizon(R, horizon)
    step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
    task = partial(_soi_rate_replication, R, horizon, step_h, bridge)
    results = run_replications(task, seed_streams(master_seed, reps), jobs)
    rates, intervals = zip(*results)
    return float(np.mean(rates)), float(np.mean(intervals))


__all__ = [
    "seed_streams",
    "run_replications",
    "summarize",
    "check_horizon",
    "mc_mse",
    "soi_bit_rate",
]
