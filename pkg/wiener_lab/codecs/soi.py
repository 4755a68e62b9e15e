#!/usr/bin/env python3
"""
Wiener Lab - Sign-of-Innovation Codec
Symmetric threshold sampler, 1-bit sign compressor and accumulate-and-hold
decoder. Sampled values form a +/- beta random walk, so the decoder
reproduces them exactly.
"""

import logging
from typing import Iterable, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from wiener_lab.errors import InputError, ParameterError
from wiener_lab.stochastic.core import Segment, WienerSegmentSource, default_threshold_step
from wiener_lab.types import CodewordRecord, ReconstructionTrace, SampleEvent, SeedStream, SoiConfig, WienerPath

logger = logging.getLogger(__name__)

# ==================== Encoder ====================

class SoiStep(NamedTuple):
    """One segment of the stream; sample/codeword are None for the truncated tail."""
    segment: Segment
    level_before: float
    sample: Optional[SampleEvent]
    codeword: Optional[CodewordRecord]


def soi_bit(innovation: float) -> str:
    return "1" if innovation >= 0 else "0"


def soi_stream(source: Iterable[Segment], config: SoiConfig, horizon: float) -> Iterator[SoiStep]:
    """Walk the segment source, emitting one step per segment including the tail."""
    beta = config.threshold
    level = 0.0
    index = 0
    for segment in source:
        event = segment.event
        if event.truncated or segment.exit_time > horizon:
            yield SoiStep(segment, level, None, None)
            return
        innovation = event.sign * beta
        before = level
        level = level + innovation
        index += 1
        step = segment.start_step + event.exit_step
        time = step * segment.step_h
        sample = SampleEvent(index=index, step=step, time=time, value=level)
        codeword = CodewordRecord(time=time, bits=soi_bit(innovation), length=1)
        yield SoiStep(segment, before, sample, codeword)


def soi_encode(source: Iterable[Segment], config: SoiConfig,
               horizon: float) -> Iterator[Tuple[SampleEvent, CodewordRecord]]:
    """
    Emit (SampleEvent, CodewordRecord) per threshold crossing up to horizon.

    Example:
        >>> source = WienerSegmentSource(1.0, 1e-3, 10.0, SeedStream(master_seed=7, stream_index=0))
        >>> events = list(soi_encode(source, SoiConfig(rate_R=1.0), 10.0))
    """
    if horizon < 0:
        raise ParameterError(f"horizon must be non-negative, got {horizon}")
    if horizon == 0:
        return
    for step in soi_stream(source, config, horizon):
        if step.sample is not None:
            yield step.sample, step.codeword

# ==================== Decoder ====================

def soi_decode(codewords: Iterable[CodewordRecord], beta: float) -> ReconstructionTrace:
    """Accumulate +/- beta at each codeword time; hold in between."""
    if beta <= 0:
        raise ParameterError("beta must be positive")
    times: List[float] = [0.0]
    levels: List[float] = [0.0]
    level = 0.0
    for record in codewords:
        if record.length != 1:
            raise InputError(f"SOI codewords are 1 bit, got length {record.length}")
        if record.time < times[-1]:
            raise InputError(f"codeword times must be non-decreasing: {record.time} after {times[-1]}")
        level = level + (beta if record.bits == "1" else -beta)
        times.append(record.time)
        levels.append(level)
    return ReconstructionTrace(times=times, levels=levels)


def soi_analytic_distortion(R: float) -> float:
    """MSE of the SOI code at rate R: 1/(6R)."""
    if R <= 0:
        raise ParameterError(f"rate R must be positive, got {R}")
    return 1.0 / (6.0 * R)

# ==================== Replications ====================

class SoiRun(NamedTuple):
    mse: float
    bits: int
    samples: int
    horizon: float
    path: Optional[WienerPath]
    events: List[SampleEvent]
    codewords: List[CodewordRecord]


def run_soi(config: SoiConfig, horizon: float, seed: SeedStream, step_h: Optional[float] = None,
            bridge: bool = True, keep_path: bool = False) -> SoiRun:
    """
    One tracking replication. The squared error is accumulated segment by
    segment (rectangle rule over grid points 0..K-1); with keep_path the
    effective path (segment-restart convention) is assembled as well.
    """
    beta = config.threshold
    step_h = step_h or default_threshold_step(beta)
    source = WienerSegmentSource(beta, step_h, horizon, seed, bridge=bridge)
    total_steps = source.total_steps
    if total_steps < 1:
        raise ParameterError("horizon shorter than one grid step")

    sq_error = 0.0
    pieces: List[np.ndarray] = []
    events: List[SampleEvent] = []
    codewords: List[CodewordRecord] = []
    final_value = 0.0

    for step in soi_stream(source, config, horizon):
        segment = step.segment
        covered = segment.values[:segment.event.exit_step]
        sq_error += float(np.dot(covered, covered))
        if keep_path:
            pieces.append(step.level_before + covered)
        if step.sample is None:
            final_value = step.level_before + float(segment.values[-1])
        else:
            final_value = step.sample.value
            events.append(step.sample)
            codewords.append(step.codeword)

    path = None
    if keep_path:
        path = WienerPath(step_h=step_h, values=np.concatenate(pieces + [np.array([final_value])]), seed=seed)

    return SoiRun(
        mse=sq_error / total_steps,
        bits=len(codewords),
        samples=len(events),
        horizon=total_steps * step_h,
        path=path,
        events=events,
        codewords=codewords,
    )


def soi_replication_mse(rate_R: float, horizon: float, step_h: float, seed: SeedStream,
                        bridge: bool = True) -> float:
    return run_soi(SoiConfig(rate_R=rate_R), horizon, seed, step_h, bridge).mse

# ==================== Serialization ====================

def codewords_to_csv(codewords: Iterable[CodewordRecord]) -> str:
    lines = ["time,bit"]
    lines.extend(f"{record.time:.9f},{record.bits}" for record in codewords)
    return "\n".join(lines) + "\n"


def codewords_from_csv(text: str) -> List[CodewordRecord]:
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if not rows or rows[0] != "time,bit":
        raise InputError("codeword CSV must start with the header 'time,bit'")
    records = []
    for number, row in enumerate(rows[1:], start=2):
        try:
            time, bits = row.split(",")
            records.append(CodewordRecord(time=float(time), bits=bits, length=len(bits)))
        except ValueError as e:
            raise InputError(f"malformed codeword row {number}: {row!r} ({e})")
    return records


__all__ = [
    "SoiStep",
    "soi_bit",
    "soi_stream",
    "soi_encode",
    "soi_decode",
    "soi_analytic_distortion",
    "SoiRun",
    "run_soi",
    "soi_replication_mse",
    "codewords_to_csv",
    "codewords_from_csv",
]
