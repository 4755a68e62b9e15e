#!/usr/bin/env python3
"""
Wiener Lab - Uniform Sampling Codec
Deterministic sampler at interval Rs/R followed by an innovation
compressor: the greedy Lloyd-Max quantizer designed on the tracked prior,
or the Gaussian test channel that realizes the informational bound.
"""

import logging
from functools import lru_cache
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from wiener_lab.config import PDF_BINS
from wiener_lab.constants import STEPS_PER_INTERVAL
from wiener_lab.errors import ParameterError
from wiener_lab.operons.lloyd_max import lloyd_max
from wiener_lab.operons.pdf_grid import gaussian_pdf, induced_error_pdf, innovation_prior_update, variance
from wiener_lab.stochastic.core import generate_path
from wiener_lab.types import PdfGrid, Quantizer, ReconstructionTrace, SeedStream, UniformConfig, WienerPath

logger = logging.getLogger(__name__)

# Relative change of the expected error below which the quantizer is treated as stationary
_STATIONARY_RTOL = 1e-9
_MAX_DESIGN_STEPS = 200

# ==================== Greedy Design ====================

class GreedyDesign(NamedTuple):
    """Per-step priors, quantizers and induced error densities; the last entry repeats forever."""
    priors: Tuple[PdfGrid, ...]
    quantizers: Tuple[Quantizer, ...]
    error_pdfs: Tuple[PdfGrid, ...]
    stationary: bool

    def quantizer_for(self, step: int) -> Quantizer:
        """Quantizer for sample `step` (1-based)."""
        return self.quantizers[min(step, len(self.quantizers)) - 1]

    @property
    def stationary_error(self) -> float:
        return self.quantizers[-1].expected_sq_error


@lru_cache(maxsize=32)
def design_schedule(rate_R: float, bits_per_sample: int = 1, n_samples: int = _MAX_DESIGN_STEPS,
                    bins: int = PDF_BINS) -> GreedyDesign:
    """
    Run the greedy recursion: design Lloyd-Max on the prior, push the prior
    through the quantizer, convolve with the next increment. The schedule
    is deterministic, so it is cached and cut short once the quantizer
    stops changing.
    """
    config = UniformConfig(rate_R=rate_R, bits_per_sample=bits_per_sample)
    if n_samples < 1:
        raise ParameterError("need at least one sample to design a schedule")
    interval = config.interval
    priors: List[PdfGrid] = [gaussian_pdf(0.0, interval, bins=bins)]
    quantizers: List[Quantizer] = []
    errors: List[PdfGrid] = []
    stationary = False

    for step in range(1, min(n_samples, _MAX_DESIGN_STEPS) + 1):
        q = lloyd_max(priors[-1], config.levels)
        quantizers.append(q)
        errors.append(induced_error_pdf(priors[-1], q))
        if step > 1:
            previous = quantizers[-2].expected_sq_error
            if abs(q.expected_sq_error - previous) <= _STATIONARY_RTOL * max(previous, 1e-300):
                stationary = True
                break
        if step < n_samples:
            priors.append(innovation_prior_update(errors[-1], interval))

    priors = priors[:len(quantizers)]
    logger.info(
        f"✅ Greedy Lloyd-Max schedule R={rate_R} Rs={bits_per_sample}: {len(quantizers)} steps, "
        f"stationary={stationary}, error={quantizers[-1].expected_sq_error:.6g}"
    )
    return GreedyDesign(tuple(priors), tuple(quantizers), tuple(errors), stationary)


def expected_greedy_mse(config: UniformConfig, bins: int = PDF_BINS) -> float:
    """Long-run MSE predicted by the stationary design: interval/2 + stationary quantizer error."""
    design = design_schedule(config.rate_R, config.bits_per_sample, bins=bins)
    return config.interval / 2.0 + design.stationary_error

# ==================== Encoders ====================

def check_uniform_step(config: UniformConfig, step_h: float) -> int:
    """Grid steps per sampling interval; the interval must be a whole number of steps."""
    interval = config.interval
    steps = int(round(interval / step_h))
    if steps < 1 or abs(steps * step_h - interval) > 1e-9 * interval:
        raise ParameterError(f"sampling interval {interval} is not a multiple of step_h {step_h}")
    return steps


def samples_per_interval(path: WienerPath, config: UniformConfig) -> int:
    steps = check_uniform_step(config, path.step_h)
    if (path.values.size - 1) // steps < 1:
        raise ParameterError(f"path horizon {path.horizon} is shorter than one sampling interval")
    return steps


def _held_mse(path: WienerPath, steps: int, levels: np.ndarray) -> float:
    k = np.arange(path.values.size - 1)
    held = levels[np.minimum(k // steps, levels.size - 1)]
    error = path.values[:-1] - held
    return float(np.mean(error * error))


def _trace(steps: int, step_h: float, levels: np.ndarray) -> ReconstructionTrace:
    return ReconstructionTrace(times=np.arange(levels.size) * steps * step_h, levels=levels)


def greedy_lloyd_encode(path: WienerPath, config: UniformConfig, design: Optional[GreedyDesign] = None,
                        bins: int = PDF_BINS) -> Tuple[ReconstructionTrace, List[Quantizer], float]:
    """
    Uniform sampling with the greedy Lloyd-Max compressor.

    Returns the reconstruction trace, the quantizer used at each sample and
    the time-averaged squared error over the path.
    """
    steps = samples_per_interval(path, config)
    n_samples = (path.values.size - 1) // steps
    design = design or design_schedule(config.rate_R, config.bits_per_sample, bins=bins)

    sampled = path.values[steps * np.arange(1, n_samples + 1)]
    levels = np.zeros(n_samples + 1)
    used: List[Quantizer] = []
    for i in range(1, n_samples + 1):
        q = design.quantizer_for(i)
        innovation = sampled[i - 1] - levels[i - 1]
        levels[i] = levels[i - 1] + q.representatives[q.index_of(innovation)]
        used.append(q)

    return _trace(steps, path.step_h, levels), used, _held_mse(path, steps, levels)


def test_channel_encode(path: WienerPath, config: UniformConfig,
                        rng: np.random.Generator) -> Tuple[ReconstructionTrace, float]:
    """
    Uniform sampling with a Gaussian test channel at Rs bits per sample:
    each innovation x ~ N(0, P) passes through y = x + n and the decoder
    adds E[x | y], leaving error variance D = P * 2^(-2 Rs).
    """
    steps = samples_per_interval(path, config)
    n_samples = (path.values.size - 1) // steps
    interval = config.interval
    shrink = 2.0 ** (-2.0 * config.bits_per_sample)

    sampled = path.values[steps * np.arange(1, n_samples + 1)]
    noise = rng.standard_normal(n_samples)
    levels = np.zeros(n_samples + 1)
    prior = interval
    for i in range(1, n_samples + 1):
        distortion = prior * shrink
        noise_var = prior * distortion / (prior - distortion)
        innovation = sampled[i - 1] - levels[i - 1]
        received = innovation + np.sqrt(noise_var) * noise[i - 1]
        levels[i] = levels[i - 1] + prior / (prior + noise_var) * received
        prior = distortion + interval

    return _trace(steps, path.step_h, levels), _held_mse(path, steps, levels)

# ==================== Replications ====================

def default_uniform_step(config: UniformConfig) -> float:
    return config.interval / STEPS_PER_INTERVAL


def uniform_replication_mse(rate_R: float, bits_per_sample: int, horizon: float, step_h: float,
                            seed: SeedStream, compressor: str = "lloyd_max",
                            design: Optional[GreedyDesign] = None) -> float:
    config = UniformConfig(rate_R=rate_R, bits_per_sample=bits_per_sample)
    path = generate_path(horizon, step_h, seed)
    if compressor == "test_channel":
        return test_channel_encode(path, config, seed.channel_generator())[1]
    return greedy_lloyd_encode(path, config, design)[2]

# ==================== Serialization ====================

def _join(values: np.ndarray) -> str:
    return ";".join(format(float(v), ".12g") for v in values)


def quantizers_to_csv(quantizers: Iterable[Quantizer]) -> str:
    lines = ["step,boundary_list,rep_list,error"]
    for step, q in enumerate(quantizers, start=1):
        lines.append(f"{step},{_join(q.boundaries)},{_join(q.representatives)},{q.expected_sq_error:.12g}")
    return "\n".join(lines) + "\n"


def prior_variances(design: GreedyDesign) -> List[float]:
    return [variance(prior) for prior in design.priors]


__all__ = [
    "GreedyDesign",
    "design_schedule",
    "expected_greedy_mse",
    "greedy_lloyd_encode",
    "test_channel_encode",
    "check_uniform_step",
    "samples_per_interval",
    "default_uniform_step",
    "uniform_replication_mse",
    "quantizers_to_csv",
    "prior_variances",
]
