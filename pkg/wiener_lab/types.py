# wiener_lab/types.py

import math
from typing import Annotated, List, Optional

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from wiener_lab.constants import BoundKind, Controller

# ==================== Helpers ====================

def _as_float_array(value) -> np.ndarray:
    return np.asarray(value, dtype=float)


FloatArray = Annotated[np.ndarray, BeforeValidator(_as_float_array)]


class ArrayModel(BaseModel):
    """Base for records that carry numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

# ==================== Randomness ====================

class SeedStream(BaseModel):
    model_config = ConfigDict(frozen=True)

    master_seed: int = Field(ge=0, lt=2**64)
    stream_index: int = Field(ge=0)

    def generator(self) -> np.random.Generator:
        """Counter-based Philox generator keyed by (master_seed, stream_index)."""
        sequence = np.random.SeedSequence([self.master_seed, self.stream_index])
        return np.random.Generator(np.random.Philox(sequence))

    def channel_generator(self) -> np.random.Generator:
        """Independent generator for channel noise, disjoint from the path stream."""
        sequence = np.random.SeedSequence([self.master_seed, self.stream_index, 1])
        return np.random.Generator(np.random.Philox(sequence))

# ==================== Wiener Paths ====================

class WienerPath(ArrayModel):
    step_h: float = Field(gt=0)
    values: FloatArray
    seed: Optional[SeedStream] = None

    @field_validator("values")
    @classmethod
    def _starts_at_zero(cls, values: np.ndarray) -> np.ndarray:
        if values.ndim != 1 or values.size < 1:
            raise ValueError("path needs at least one value")
        if values[0] != 0.0:
            raise ValueError("W_0 must be 0")
        return values

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.step_h

    @property
    def horizon(self) -> float:
        return (self.values.size - 1) * self.step_h

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


class ExitEvent(BaseModel):
    exit_step: int = Field(ge=0)
    sign: int
    elapsed: float = Field(ge=0)
    raw_value: float
    truncated: bool = False
    bridged: bool = False

    @model_validator(mode="after")
    def _sign_matches_status(self):
        if self.truncated and self.sign != 0:
            raise ValueError("truncated segments carry sign 0")
        if not self.truncated and self.sign not in (1, -1):
            raise ValueError("exit sign must be +1 or -1")
        return self

# ==================== Codewords ====================

class SampleEvent(BaseModel):
    index: int = Field(ge=1)
    step: int = Field(ge=0)
    time: float = Field(ge=0)
    value: float


class CodewordRecord(BaseModel):
    time: float = Field(ge=0)
    bits: str = Field(pattern=r"^[01]+$")
    length: int = Field(ge=1)

    @model_validator(mode="after")
    def _length_matches_bits(self):
        if len(self.bits) != self.length:
            raise ValueError(f"codeword length {self.length} != len(bits) {len(self.bits)}")
        return self


class ReconstructionTrace(ArrayModel):
    """Piecewise-constant, right-continuous decoder estimate."""

    times: FloatArray
    levels: FloatArray

    @model_validator(mode="after")
    def _check_breakpoints(self):
        if self.times.shape != self.levels.shape or self.times.size < 1:
            raise ValueError("times and levels must be equal-length, non-empty")
        if self.times[0] != 0.0 or self.levels[0] != 0.0:
            raise ValueError("first breakpoint must be (0, 0)")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("breakpoint times must be non-decreasing")
        return self

    def level_at(self, t) -> np.ndarray:
        index = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right") - 1
        return self.levels[np.clip(index, 0, None)]

# ==================== Codec Configs ====================

class SoiConfig(BaseModel):
    rate_R: float = Field(gt=0)

    @property
    def threshold(self) -> float:
        return math.sqrt(1.0 / self.rate_R)


class UniformConfig(BaseModel):
    rate_R: float = Field(gt=0)
    bits_per_sample: int = Field(default=1, ge=1)

    @property
    def interval(self) -> float:
        return self.bits_per_sample / self.rate_R

    @property
    def frequency(self) -> float:
        return self.rate_R / self.bits_per_sample

    @property
    def levels(self) -> int:
        return 2 ** self.bits_per_sample

# ==================== Quantization ====================

class PdfGrid(ArrayModel):
    lo: float
    hi: float
    densities: FloatArray

    @model_validator(mode="after")
    def _check_grid(self):
        if not self.lo < self.hi:
            raise ValueError("pdf grid needs lo < hi")
        if self.densities.ndim != 1 or self.densities.size < 8:
            raise ValueError("pdf grid needs at least 8 bins")
        if np.any(self.densities < 0):
            raise ValueError("densities must be non-negative")
        total = float(self.densities.sum() * self.width)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pdf mass {total!r} is not 1")
        return self

    @property
    def bins(self) -> int:
        return int(self.densities.size)

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.densities.size

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)

    @property
    def centers(self) -> np.ndarray:
        edges = self.edges
        return 0.5 * (edges[:-1] + edges[1:])

    @property
    def masses(self) -> np.ndarray:
        return self.densities * self.width


class Quantizer(ArrayModel):
    boundaries: FloatArray
    representatives: FloatArray
    expected_sq_error: float = Field(ge=0)
    cell_probabilities: FloatArray
    iterations: int = 0
    converged: bool = True

    @model_validator(mode="after")
    def _check_cells(self):
        levels = self.representatives.size
        if levels < 2 or self.boundaries.size != levels - 1:
            raise ValueError("a quantizer needs M >= 2 levels and M - 1 boundaries")
        if np.any(np.diff(self.boundaries) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        if self.cell_probabilities.size != levels:
            raise ValueError("one probability per cell")
        if abs(float(self.cell_probabilities.sum()) - 1.0) > 1e-9:
            raise ValueError("cell probabilities must sum to 1")
        return self

    @property
    def levels(self) -> int:
        return int(self.representatives.size)

    @property
    def bits(self) -> int:
        return int(round(math.log2(self.levels)))

    def index_of(self, x) -> np.ndarray:
        return np.searchsorted(self.boundaries, x, side="right")

    def quantize(self, x) -> np.ndarray:
        return self.representatives[self.index_of(x)]

# ==================== Finite-N Program ====================

class IntervalAllocation(ArrayModel):
    """Sampling intervals T_0..T_N of a deterministic policy."""

    T: FloatArray

    @field_validator("T")
    @classmethod
    def _non_negative(cls, T: np.ndarray) -> np.ndarray:
        if T.ndim != 1 or T.size < 2:
            raise ValueError("need T_0..T_N with N >= 1")
        if np.any(T < 0):
            raise ValueError("sampling intervals must be non-negative")
        return T

    @property
    def N(self) -> int:
        return int(self.T.size - 1)

    @property
    def f(self) -> float:
        total = float(self.T.sum())
        return self.N / total if total > 0 else math.inf


class DistortionAllocation(ArrayModel):
    """Sample distortions D_1..D_N."""

    D: FloatArray

    @field_validator("D")
    @classmethod
    def _non_negative(cls, D: np.ndarray) -> np.ndarray:
        if D.ndim != 1 or D.size < 1:
            raise ValueError("need D_1..D_N with N >= 1")
        if np.any(D < 0):
            raise ValueError("distortions must be non-negative")
        return D

    def is_feasible(self, allocation: IntervalAllocation, rtol: float = 1e-12) -> bool:
        """D_{i-1} + T_{i-1} >= D_i for i = 1..N, with D_0 = 0."""
        previous = np.concatenate(([0.0], self.D[:-1])) + allocation.T[:-1]
        slack = previous - self.D
        return bool(np.all(slack >= -rtol * np.maximum(previous, 1.0)))


class IdrfSolution(BaseModel):
    allocation: IntervalAllocation
    distortions: DistortionAllocation
    lambda_star: float = Field(ge=0)
    value: float
    kind: BoundKind
    f: float = Field(gt=0)
    Rs: float
    N: int = Field(ge=1)


class ClosedForms(BaseModel):
    R: float = Field(gt=0)
    dop: float
    ddet: float
    dnoncausal: float
    soi_lookahead: float
    uniform_lookahead_sampling: float
    uniform_lookahead_total: float

    def dop_f_rs(self, f: float) -> float:
        return 1.0 / (6.0 * f)

    def ddet_f_rs(self, f: float, Rs: float) -> float:
        return 1.0 / (2.0 * f) + 1.0 / (f * (2.0 ** (2.0 * Rs) - 1.0))

    def dch(self, delta: float) -> float:
        return self.dop + delta

# ==================== Evaluation ====================

class RateDistortionPoint(BaseModel):
    method: str
    R: float = Field(gt=0)
    f: float = Field(gt=0)
    Rs: float = Field(gt=0)
    mse: float
    ci_halfwidth: float = Field(ge=0)
    stderr: float = Field(ge=0)
    reps: int = Field(ge=1)
    horizon: float = Field(gt=0)


class DecompositionReport(BaseModel):
    sampling_term: float
    quantization_term: float
    cross_term: float
    total: float

    @model_validator(mode="after")
    def _terms_add_up(self):
        parts = self.sampling_term + self.quantization_term + self.cross_term
        if abs(self.total - parts) >= 1e-9:
            raise ValueError("decomposition terms do not add up to the total")
        return self

# ==================== Control ====================

class ControlTrace(ArrayModel):
    times: FloatArray
    values: FloatArray
    impulse_times: FloatArray
    impulse_magnitudes: FloatArray
    pre_impulse_states: FloatArray
    post_impulse_states: FloatArray


class ControlCostPoint(BaseModel):
    controller: Controller
    R: float = Field(gt=0)
    cost: float
    ci_halfwidth: float = Field(ge=0)
    stderr: float = Field(ge=0)
    reps: int = Field(ge=1)
    horizon: float = Field(gt=0)
    impulse_rate: float = Field(ge=0)

# ==================== CLI ====================

class ExperimentConfig(BaseModel):
    command: str
    rates: List[float] = Field(min_length=1)
    horizon: Optional[float] = Field(default=None, gt=0)
    reps: int = Field(default=100, ge=1)
    step_h: Optional[float] = Field(default=None, gt=0)
    master_seed: int = Field(default=7, ge=0, lt=2**64)
    delta: List[float] = Field(default_factory=list)
    n_list: List[int] = Field(default_factory=list)
    rs_list: List[int] = Field(default_factory=list)
    output: Optional[str] = None
    jobs: int = Field(default=1, ge=1)
    bridge: bool = True
    extra: dict = Field(default_factory=dict)

    @field_validator("rates")
    @classmethod
    def _positive_rates(cls, rates: List[float]) -> List[float]:
        if any(r <= 0 for r in rates):
            raise ValueError("rates must be positive")
        return rates

    @field_validator("delta")
    @classmethod
    def _non_negative_delays(cls, delta: List[float]) -> List[float]:
        if any(d < 0 for d in delta):
            raise ValueError("delays must be non-negative")
        return delta

    @field_validator("n_list", "rs_list")
    @classmethod
    def _positive_ints(cls, values: List[int]) -> List[int]:
        if any(v < 1 for v in values):
            raise ValueError("N and Rs values must be >= 1")
        return values
