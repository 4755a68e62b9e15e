#!/usr/bin/env python3
"""
Wiener Lab - Impulse Control Simulator
Plant dX = Z dt + dW under a rate-limited link. The controller applies an
impulse equal to minus the decoded innovation at every codeword arrival,
so between impulses X follows the driving Wiener increments.
"""

import logging
from functools import partial
from typing import List, Optional, Tuple

import numpy as np

from wiener_lab.config import DEFAULT_JOBS, PDF_BINS
from wiener_lab.constants import Controller
from wiener_lab.errors import ParameterError
from wiener_lab.codecs.soi import soi_stream
from wiener_lab.codecs.uniform import GreedyDesign, check_uniform_step, default_uniform_step, design_schedule
from wiener_lab.evaluation.harness import run_replications, seed_streams, summarize
from wiener_lab.stochastic.core import WienerSegmentSource, default_threshold_step, generate_path
from wiener_lab.types import ControlCostPoint, ControlTrace, SeedStream, SoiConfig, UniformConfig

logger = logging.getLogger(__name__)

# ==================== Single Paths ====================

def _soi_control(rate_R: float, horizon: float, step_h: float, seed: SeedStream,
                 bridge: bool, keep_path: bool) -> Tuple[ControlTrace, float]:
    config = SoiConfig(rate_R=rate_R)
    beta = config.threshold
    source = WienerSegmentSource(beta, step_h, horizon, seed, bridge=bridge)
    post = 0.0
    sq_cost = 0.0
    pieces: List[np.ndarray] = []
    impulse_times, magnitudes, pre_states, post_states = [], [], [], []
    final = 0.0

    for step in soi_stream(source, config, horizon):
        segment = step.segment
        x = post + segment.values[:segment.event.exit_step]
        sq_cost += float(np.dot(x, x))
        if keep_path:
            pieces.append(x)
        if step.sample is None:
            final = post + float(segment.values[-1])
            continue
        innovation = segment.event.sign * beta
        pre = post + innovation
        impulse = -innovation
        post = pre + impulse
        final = post
        impulse_times.append(step.sample.time)
        magnitudes.append(impulse)
        pre_states.append(pre)
        post_states.append(post)

    values = np.concatenate(pieces + [np.array([final])]) if keep_path else np.empty(0)
    trace = ControlTrace(
        times=np.arange(values.size) * step_h,
        values=values,
        impulse_times=impulse_times,
        impulse_magnitudes=magnitudes,
        pre_impulse_states=pre_states,
        post_impulse_states=post_states,
    )
    return trace, sq_cost / source.total_steps


def _uniform_control(rate_R: float, bits_per_sample: int, horizon: float, step_h: float,
                     seed: SeedStream, design: Optional[GreedyDesign],
                     keep_path: bool, bins: int = PDF_BINS) -> Tuple[ControlTrace, float]:
    config = UniformConfig(rate_R=rate_R, bits_per_sample=bits_per_sample)
    path = generate_path(horizon, step_h, seed)
    W = path.values
    K = W.size - 1
    steps = check_uniform_step(config, step_h)
    n_samples = K // steps
    if n_samples >= 1 and design is None:
        design = design_schedule(rate_R, bits_per_sample, bins=bins)

    # X_t = W_t - (sum of applied impulses so far), so X only shifts at sample steps
    offset = np.zeros(n_samples + 1)
    impulse_times, magnitudes, pre_states, post_states = [], [], [], []
    for i in range(1, n_samples + 1):
        q = design.quantizer_for(i)
        pre = W[i * steps] - offset[i - 1]
        impulse = -float(q.representatives[q.index_of(pre)])
        offset[i] = offset[i - 1] - impulse
        impulse_times.append(i * steps * step_h)
        magnitudes.append(impulse)
        pre_states.append(pre)
        post_states.append(pre + impulse)

    k = np.arange(K + 1)
    X = W - offset[np.minimum(k // steps, n_samples)]
    cost = float(np.mean(X[:-1] * X[:-1]))
    trace = ControlTrace(
        times=path.times if keep_path else np.empty(0),
        values=X if keep_path else np.empty(0),
        impulse_times=impulse_times,
        impulse_magnitudes=magnitudes,
        pre_impulse_states=pre_states,
        post_impulse_states=post_states,
    )
    return trace, cost


def simulate_control_path(controller: Controller, R: float, horizon: float, seed: SeedStream,
                          step_h: Optional[float] = None, *, keep_path: bool = True,
                          bits_per_sample: int = 1, bridge: bool = True,
                          bins: int = PDF_BINS) -> Tuple[ControlTrace, float]:
    """One controlled path and its time-averaged X^2 cost."""
    controller = Controller(controller)
    if R <= 0 or horizon <= 0:
        raise ParameterError("rate and horizon must be positive")
    if controller == Controller.SOI:
        step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
        return _soi_control(R, horizon, step_h, seed, bridge, keep_path)
    config = UniformConfig(rate_R=R, bits_per_sample=bits_per_sample)
    step_h = step_h or default_uniform_step(config)
    return _uniform_control(R, bits_per_sample, horizon, step_h, seed, None, keep_path, bins)

# ==================== Replications ====================

def _soi_cost(rate_R: float, horizon: float, step_h: float, bridge: bool,
              seed: SeedStream) -> Tuple[float, int]:
    trace, cost = _soi_control(rate_R, horizon, step_h, seed, bridge, keep_path=False)
    return cost, trace.impulse_times.size


def _uniform_cost(rate_R: float, bits_per_sample: int, horizon: float, step_h: float,
                  design: Optional[GreedyDesign], seed: SeedStream) -> Tuple[float, int]:
    trace, cost = _uniform_control(rate_R, bits_per_sample, horizon, step_h, seed, design, keep_path=False)
    return cost, trace.impulse_times.size


def _cost_point(controller: Controller, R: float, horizon: float, reps: int, results) -> ControlCostPoint:
    costs, impulses = zip(*results)
    cost, stderr, ci = summarize(costs)
    rate = float(np.mean(impulses)) / horizon
    logger.info(f"✅ {controller.value} control R={R}: cost={cost:.6g} ± {ci:.2g}, impulses/s={rate:.4g}")
    return ControlCostPoint(controller=controller, R=R, cost=cost, ci_halfwidth=ci, stderr=stderr,
                            reps=reps, horizon=horizon, impulse_rate=rate)


def _check(R: float, horizon: float) -> None:
    if R <= 0 or horizon <= 0:
        raise ParameterError("rate and horizon must be positive")


def simulate_soi_control(R: float, horizon: float, reps: int, master_seed: int,
                         step_h: Optional[float] = None, *, bridge: bool = True,
                         jobs: int = DEFAULT_JOBS) -> ControlCostPoint:
    """Mean-square cost of SOI sampling with impulses Z = -(received innovation)."""
    _check(R, horizon)
    step_h = step_h or default_threshold_step(SoiConfig(rate_R=R).threshold)
    task = partial(_soi_cost, R, horizon, step_h, bridge)
    results = run_replications(task, seed_streams(master_seed, reps), jobs)
    return _cost_point(Controller.SOI, R, horizon, reps, results)


def simulate_uniform_control(R: float, horizon: float, reps: int, master_seed: int,
                             step_h: Optional[float] = None, *, bits_per_sample: int = 1,
                             jobs: int = DEFAULT_JOBS, bins: int = PDF_BINS) -> ControlCostPoint:
    """Mean-square cost of uniform sampling with greedy Lloyd-Max impulses."""
    _check(R, horizon)
    config = UniformConfig(rate_R=R, bits_per_sample=bits_per_sample)
    step_h = step_h or default_uniform_step(config)
    if step_h > horizon:
        step_h = horizon / 1000.0
    check_uniform_step(config, step_h)
    design = design_schedule(R, bits_per_sample, bins=bins) if horizon >= config.interval else None
    task = partial(_uniform_cost, R, bits_per_sample, horizon, step_h, design)
    results = run_replications(task, seed_streams(master_seed, reps), jobs)
    return _cost_point(Controller.UNIFORM, R, horizon, reps, results)


__all__ = ["simulate_control_path", "simulate_soi_control", "simulate_uniform_control"]
