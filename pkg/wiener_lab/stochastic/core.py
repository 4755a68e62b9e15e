# wiener_lab/stochastic/core.py

import logging
import math
from typing import Iterator, NamedTuple, Tuple, Union

import numpy as np

from wiener_lab.constants import MAX_THRESHOLD_STEP, THRESHOLD_STEP_DIVISOR
from wiener_lab.errors import ParameterError
from wiener_lab.types import ExitEvent, SeedStream, WienerPath

logger = logging.getLogger(__name__)

_MIN_BLOCK = 64
_MAX_BLOCK = 1 << 20

# ==================== Paths ====================

def grid_steps(horizon: float, step_h: float) -> int:
    """Number of grid steps covering [0, horizon]."""
    return int(math.floor(horizon / step_h + 1e-9))


def default_threshold_step(threshold: float) -> float:
    return min(MAX_THRESHOLD_STEP, threshold ** 2 / THRESHOLD_STEP_DIVISOR)


def generate_path(horizon: float, step_h: float, seed: SeedStream) -> WienerPath:
    """
    Standard Wiener process on the grid k * step_h, k = 0..floor(horizon/step_h).
    The path depends only on (horizon, step_h, seed).
    """
    if step_h <= 0 or horizon <= 0:
        raise ParameterError("horizon and step_h must be positive")
    if step_h > horizon:
        raise ParameterError(f"step_h {step_h} exceeds horizon {horizon}")
    steps = grid_steps(horizon, step_h)
    increments = seed.generator().normal(0.0, math.sqrt(step_h), steps)
    values = np.concatenate(([0.0], np.cumsum(increments)))
    return WienerPath(step_h=step_h, values=values, seed=seed)

# ==================== Increment Stream ====================

class IncrementStream:
    """Buffered N(0, h) increments drawn from one generator; unused draws can be pushed back."""

    def __init__(self, rng: np.random.Generator, step_h: float):
        if step_h <= 0:
            raise ParameterError("step_h must be positive")
        self.rng = rng
        self.step_h = step_h
        self._scale = math.sqrt(step_h)
        self._pending = np.empty(0)

    @classmethod
    def from_seed(cls, seed: SeedStream, step_h: float) -> "IncrementStream":
        return cls(seed.generator(), step_h)

    def take(self, n: int) -> np.ndarray:
        if self._pending.size >= n:
            out, self._pending = self._pending[:n], self._pending[n:]
            return out
        fresh = self.rng.normal(0.0, self._scale, n - self._pending.size)
        out = np.concatenate((self._pending, fresh))
        self._pending = np.empty(0)
        return out

    def give_back(self, unused: np.ndarray) -> None:
        if unused.size:
            self._pending = np.concatenate((unused, self._pending))

    def uniforms(self, n: int) -> np.ndarray:
        return self.rng.random(n)

# ==================== Exit Scanning ====================

def first_exit(values: np.ndarray, threshold: float, step_h: float, start: int = 0) -> ExitEvent:
    """
    First k > start with |values[k] - values[start]| >= threshold, on a
    precomputed path. Returns a truncated event when the path never exits.
    """
    if threshold <= 0:
        raise ParameterError("threshold must be positive")
    relative = values[start + 1:] - values[start]
    hits = np.flatnonzero(np.abs(relative) >= threshold)
    if hits.size == 0:
        n = relative.size
        return ExitEvent(exit_step=n, sign=0, elapsed=n * step_h,
                         raw_value=float(relative[-1]) if n else 0.0, truncated=True)
    j = int(hits[0])
    return ExitEvent(exit_step=j + 1, sign=1 if relative[j] > 0 else -1,
                     elapsed=(j + 1) * step_h, raw_value=float(relative[j]))


def _bridge_crossings(prev: np.ndarray, path: np.ndarray, threshold: float, step_h: float,
                      u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # Brownian-bridge probability of touching +/- threshold between grid points
    p_up = np.exp(-2.0 * np.clip(threshold - prev, 0, None) * np.clip(threshold - path, 0, None) / step_h)
    p_down = np.exp(-2.0 * np.clip(threshold + prev, 0, None) * np.clip(threshold + path, 0, None) / step_h)
    crossed = u < p_up + p_down
    sign = np.where(u < p_up, 1, -1)
    return crossed, sign


def segment_until_exit(threshold: float, step_h: float, max_steps: int,
                       seed: Union[SeedStream, IncrementStream], *,
                       bridge: bool = False) -> Tuple[ExitEvent, np.ndarray]:
    """
    Simulate a fresh Wiener segment from 0 until |W| >= threshold or
    max_steps grid steps elapse.

    Returns the exit event and the segment values at offsets
    0..exit_step (offset 0 is the segment start, value 0). With
    bridge=True an excursion between two grid points is also counted as
    an exit, using the Brownian-bridge crossing probability.
    """
    if threshold <= 0 or step_h <= 0:
        raise ParameterError("threshold and step_h must be positive")
    if max_steps < 0:
        raise ParameterError("max_steps must be non-negative")
    stream = seed if isinstance(seed, IncrementStream) else IncrementStream.from_seed(seed, step_h)

    block = int(min(max(2 * math.ceil(threshold ** 2 / step_h), _MIN_BLOCK), _MAX_BLOCK))
    pieces = [np.zeros(1)]
    level = 0.0
    position = 0

    while position < max_steps:
        n = min(block, max_steps - position)
        increments = stream.take(n)
        path = level + np.cumsum(increments)
        hit = np.abs(path) >= threshold
        bridged = np.zeros(n, dtype=bool)
        bridge_sign = None
        if bridge:
            prev = np.concatenate(([level], path[:-1]))
            crossed, bridge_sign = _bridge_crossings(prev, path, threshold, step_h, stream.uniforms(n))
            bridged = crossed & ~hit
        exits = np.flatnonzero(hit | bridged)
        if exits.size:
            j = int(exits[0])
            stream.give_back(increments[j + 1:])
            pieces.append(path[:j + 1])
            if hit[j]:
                sign = 1 if path[j] > 0 else -1
            else:
                sign = int(bridge_sign[j])
            exit_step = position + j + 1
            event = ExitEvent(exit_step=exit_step, sign=sign, elapsed=exit_step * step_h,
                              raw_value=float(path[j]), bridged=bool(bridged[j] and not hit[j]))
            return event, np.concatenate(pieces)
        pieces.append(path)
        level = float(path[-1])
        position += n

    event = ExitEvent(exit_step=position, sign=0, elapsed=position * step_h,
                      raw_value=level, truncated=True)
    return event, np.concatenate(pieces)

# ==================== Segment Source ====================

class Segment(NamedTuple):
    start_step: int
    event: ExitEvent
    values: np.ndarray
    step_h: float

    @property
    def exit_time(self) -> float:
        return (self.start_step + self.event.exit_step) * self.step_h


class WienerSegmentSource:
    """
    Streams consecutive threshold segments over [0, horizon]. Each segment
    restarts at 0 relative to the previous exit level; the last one is
    truncated at the horizon unless an exit lands exactly on it.
    """

    def __init__(self, threshold: float, step_h: float, horizon: float,
                 seed: SeedStream, bridge: bool = True):
        if threshold <= 0:
            raise ParameterError("threshold must be positive")
        if step_h <= 0 or horizon <= 0:
            raise ParameterError("horizon and step_h must be positive")
        self.threshold = threshold
        self.step_h = step_h
        self.horizon = horizon
        self.total_steps = grid_steps(horizon, step_h)
        self.bridge = bridge
        self.stream = IncrementStream.from_seed(seed, step_h)
        self.steps_used = 0

    def __iter__(self) -> Iterator[Segment]:
        while self.steps_used < self.total_steps:
            remaining = self.total_steps - self.steps_used
            event, values = segment_until_exit(self.threshold, self.step_h, remaining,
                                               self.stream, bridge=self.bridge)
            segment = Segment(self.steps_used, event, values, self.step_h)
            self.steps_used += event.exit_step
            yield segment
            if event.truncated:
                return


class ArraySegmentSource:
    """Threshold segments cut from a precomputed path (restart convention)."""

    def __init__(self, path: WienerPath, threshold: float):
        self.path = path
        self.threshold = threshold
        self.step_h = path.step_h

    def __iter__(self) -> Iterator[Segment]:
        values = self.path.values
        start, total = 0, values.size - 1
        while start < total:
            event = first_exit(values, self.threshold, self.step_h, start)
            local = values[start:start + event.exit_step + 1] - values[start]
            yield Segment(start, event, local, self.step_h)
            if event.truncated:
                return
            start += event.exit_step


__all__ = [
    "grid_steps",
    "default_threshold_step",
    "generate_path",
    "IncrementStream",
    "first_exit",
    "segment_until_exit",
    "Segment",
    "WienerSegmentSource",
    "ArraySegmentSource",
]
