# wiener_lab/idrf/finite_n.py

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import bisect, minimize, minimize_scalar

from wiener_lab.config import MAX_N
from wiener_lab.constants import LAMBDA_MAX_DOUBLINGS, LAMBDA_MAX_HALVINGS, LOG2E, BoundKind
from wiener_lab.errors import InputError, NumericalError, ParameterError
from wiener_lab.types import DistortionAllocation, IdrfSolution, IntervalAllocation

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, list, tuple]

# ==================== Helpers ====================

def _intervals(T: Union[IntervalAllocation, ArrayLike]) -> np.ndarray:
    return T.T if isinstance(T, IntervalAllocation) else np.asarray(T, dtype=float)


def _distortions(D: Union[DistortionAllocation, ArrayLike]) -> np.ndarray:
    return D.D if isinstance(D, DistortionAllocation) else np.asarray(D, dtype=float)


def _check_pair(D: np.ndarray, T: np.ndarray) -> int:
    if T.size != D.size + 1:
        raise InputError(f"need N+1 intervals for N distortions, got {T.size} and {D.size}")
    return int(D.size)


def _check_program(f: float, Rs: float, N: int, minimum_N: int = 1) -> None:
    if f <= 0:
        raise ParameterError(f"sampling frequency must be positive, got {f}")
    if Rs < 1:
        raise ParameterError(f"bits per sample must be >= 1, got {Rs}")
    if N < minimum_N:
        raise ParameterError(f"N must be >= {minimum_N}, got {N}")
    if N > MAX_N:
        raise ParameterError(f"N={N} exceeds WIENER_LAB_MAX_N={MAX_N}")

# ==================== Objective ====================

def z_of(D: Union[DistortionAllocation, ArrayLike], T: Union[IntervalAllocation, ArrayLike]) -> float:
    """
    Average directed information per sample, in bits:
    (1/N) (sum_{i<N} log2(1 + T_i/D_i) + log2(T_0/D_N)).

    Example:
        >>> z_of([1.0, 1.0], [1.0, 1.0, 1.0])
        0.5
    """
    D, T = _distortions(D), _intervals(T)
    N = _check_pair(D, T)
    if np.any(D <= 0):
        raise NumericalError("z diverges: a sample distortion is zero")
    if T[0] <= 0:
        raise NumericalError("z needs T_0 > 0")
    interior = np.log2(1.0 + T[1:N] / D[:N - 1]).sum()
    return float((interior + np.log2(T[0] / D[N - 1])) / N)


def dn_objective(T: Union[IntervalAllocation, ArrayLike], D: Union[DistortionAllocation, ArrayLike],
                 f: float) -> float:
    """(f/N) (sum_{i=0}^{N} T_i^2 / 2 + sum_{i=1}^{N} T_i D_i)."""
    D, T = _distortions(D), _intervals(T)
    N = _check_pair(D, T)
    return float(f / N * (np.sum(T * T) / 2.0 + np.dot(T[1:], D)))


def optimal_distortions(T: Union[IntervalAllocation, ArrayLike], lambda_star: float) -> np.ndarray:
    """KKT distortions for multiplier lambda_star (c = lambda_star * log2 e)."""
    T = _intervals(T)
    c = lambda_star * LOG2E
    interior = T[1:-1]
    # (-T + sqrt(T^2 + 4c)) / 2, rationalized
    D = 2.0 * c / (interior + np.sqrt(interior * interior + 4.0 * c))
    return np.append(D, c / T[-1])

# ==================== Multiplier ====================

def solve_lambda(T: Union[IntervalAllocation, ArrayLike], Rs: float) -> Tuple[float, DistortionAllocation]:
    """
    Find lambda* >= 0 with z(D*(lambda*)) = 2 Rs.

    z(D*) is strictly decreasing in lambda, so the bracket is grown in
    log space from lambda log2 e = 1 and then bisected.
    """
    T = _intervals(T)
    if Rs < 1:
        raise ParameterError(f"bits per sample must be >= 1, got {Rs}")
    if T.size < 2 or T[0] <= 0 or T[-1] <= 0:
        raise ParameterError("solve_lambda needs N >= 1 and T_0, T_N > 0")
    target = 2.0 * Rs

    def gap(log_c: float) -> float:
        return z_of(optimal_distortions(T, math.exp(log_c) / LOG2E), T) - target

    lo, hi = 0.0, 0.0
    if gap(0.0) > 0:
        for _ in range(LAMBDA_MAX_DOUBLINGS):
            lo, hi = hi, hi + math.log(2.0)
            if gap(hi) <= 0:
                break
        else:
            raise NumericalError(f"lambda bracket not found after {LAMBDA_MAX_DOUBLINGS} doublings")
    else:
        for _ in range(LAMBDA_MAX_HALVINGS):
            lo, hi = lo - math.log(2.0), lo
            if gap(lo) >= 0:
                break
        else:
            raise NumericalError(f"lambda bracket not found after {LAMBDA_MAX_HALVINGS} halvings")

    if gap(lo) == 0:
        log_c = lo
    elif gap(hi) == 0:
        log_c = hi
    else:
        log_c = bisect(gap, lo, hi, xtol=1e-13, maxiter=400)
    lambda_star = math.exp(log_c) / LOG2E
    return lambda_star, DistortionAllocation(D=optimal_distortions(T, lambda_star))

# ==================== Bounds ====================

def _solution(T: np.ndarray, f: float, Rs: float, kind: BoundKind) -> IdrfSolution:
    lambda_star, D = solve_lambda(T, Rs)
    allocation = IntervalAllocation(T=T)
    return IdrfSolution(
        allocation=allocation,
        distortions=D,
        lambda_star=lambda_star,
        value=dn_objective(allocation, D, f),
        kind=kind,
        f=f,
        Rs=Rs,
        N=allocation.N,
    )


def uniform_allocation(f: float, N: int) -> np.ndarray:
    """T_i = N / (f (N+1)) for i = 0..N."""
    return np.full(N + 1, N / (f * (N + 1)))


def upper_bound_dn(f: float, Rs: float, N: int) -> IdrfSolution:
    """Value of the program at the uniform allocation, after checking D_{i-1} + T_{i-1} >= D_i."""
    _check_program(f, Rs, N)
    solution = _solution(uniform_allocation(f, N), f, Rs, BoundKind.UPPER_BOUND)
    if not solution.distortions.is_feasible(solution.allocation, rtol=1e-9):
        raise NumericalError(f"uniform allocation infeasible at f={f}, Rs={Rs}, N={N}")
    return solution


def symmetric_allocation(f: float, N: int, endpoint: float) -> np.ndarray:
    """T_0 = T_N = endpoint, interior intervals share the rest equally."""
    interior = (N / f - 2.0 * endpoint) / (N - 1)
    T = np.full(N + 1, interior)
    T[0] = T[-1] = endpoint
    return T


def _endpoint_allocation(f: float, N: int, x: np.ndarray) -> np.ndarray:
    # softmax over (T_0, T_N, interior total) keeps every part positive
    weights = np.exp(np.append(x, 0.0) - max(np.max(x), 0.0))
    weights /= weights.sum()
    total = N / f
    T = np.full(N + 1, total * weights[2] / (N - 1))
    T[0], T[-1] = total * weights[0], total * weights[1]
    return T


def lower_bound_dn(f: float, Rs: float, N: int, symmetric: bool = True) -> IdrfSolution:
    """
    Lower bound on D_N: the feasibility constraint is dropped, interior
    intervals are equal, and T_0 = T_N = a is optimized over (0, N/(2f)).
    With symmetric=False the endpoints are searched independently as an audit.
    """
    _check_program(f, Rs, N, minimum_N=2)
    horizon = N / f

    def value(a: float) -> float:
        T = symmetric_allocation(f, N, a)
        lambda_star, D = solve_lambda(T, Rs)
        return dn_objective(T, D, f)

    eps = 1e-9 * horizon
    result = minimize_scalar(value, bounds=(eps, horizon / 2.0 - eps), method="bounded",
                             options={"xatol": 1e-10 * horizon})
    candidates = [(float(result.fun), float(result.x))]
    uniform_a = N / (f * (N + 1))
    candidates.append((value(uniform_a), uniform_a))
    best_value, best_a = min(candidates)
    T = symmetric_allocation(f, N, best_a)

    if not symmetric:
        start = np.log(np.array([best_a, best_a]) / (horizon - 2.0 * best_a))

        def asymmetric_value(x: np.ndarray) -> float:
            trial = _endpoint_allocation(f, N, x)
            lambda_star, D = solve_lambda(trial, Rs)
            return dn_objective(trial, D, f)

        audit = minimize(asymmetric_value, start, method="Nelder-Mead",
                         options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        if audit.fun < best_value:
            logger.info(f"📝 Asymmetric search improved the bound by {best_value - audit.fun:.3e}")
            T = _endpoint_allocation(f, N, audit.x)

    return _solution(T, f, Rs, BoundKind.LOWER_BOUND)

# ==================== Limits ====================

def idrf_limit(f: float, Rs: float) -> float:
    """Large-N limit of the finite-N program: 1/(2f) + 1/(f (2^(2Rs) - 1))."""
    if f <= 0:
        raise ParameterError(f"sampling frequency must be positive, got {f}")
    if Rs <= 0:
        raise ParameterError(f"bits per sample must be positive, got {Rs}")
    return 1.0 / (2.0 * f) + 1.0 / (f * (2.0 ** (2.0 * Rs) - 1.0))


def limit_multiplier(f: float, Rs: float) -> float:
    """lambda* log2 e as N grows: 1/(f^2 (4^Rs - 1)^2) + 1/(f^2 (4^Rs - 1))."""
    gain = 2.0 ** (2.0 * Rs) - 1.0
    return 1.0 / (f * f * gain * gain) + 1.0 / (f * f * gain)


def interior_objective(T_interior: ArrayLike, lambda_star: float) -> float:
    """sum_i T_i sqrt(T_i^2 + 4 lambda* log2 e): the interior part of the bound at fixed multiplier."""
    T = np.asarray(T_interior, dtype=float)
    c = lambda_star * LOG2E
    return float(np.sum(T * np.sqrt(T * T + 4.0 * c)))


def bound_objective(T: Union[IntervalAllocation, ArrayLike], f: float, Rs: float,
                    lambda_star: Optional[float] = None) -> float:
    """dn_objective at the KKT distortions for T (multiplier re-solved unless given)."""
    T = _intervals(T)
    if lambda_star is None:
        lambda_star, _ = solve_lambda(T, Rs)
    return dn_objective(T, optimal_distortions(T, lambda_star), f)


__all__ = [
    "z_of",
    "dn_objective",
    "optimal_distortions",
    "solve_lambda",
    "uniform_allocation",
    "symmetric_allocation",
    "upper_bound_dn",
    "lower_bound_dn",
    "idrf_limit",
    "limit_multiplier",
    "interior_objective",
    "bound_objective",
]
