# wiener_lab/idrf/closed_forms.py

import logging
import math
from typing import Tuple

from wiener_lab.constants import LOG2E, MAX_BITS_PER_SAMPLE, Frontier
from wiener_lab.errors import ParameterError
from wiener_lab.idrf.finite_n import idrf_limit
from wiener_lab.types import ClosedForms

logger = logging.getLogger(__name__)


def _check_rate(R: float) -> None:
    if R <= 0:
        raise ParameterError(f"rate R must be positive, got {R}")

# ==================== Distortion-Rate Curves ====================

def dop(R: float) -> float:
    """Optimal causal distortion-rate function, achieved by SOI: 1/(6R)."""
    _check_rate(R)
    return 1.0 / (6.0 * R)


def ddet(R: float) -> float:
    """Best distortion with deterministic sampling: 5/(6R)."""
    _check_rate(R)
    return idrf_limit(R, 1)


def dnoncausal(R: float) -> float:
    """Non-causal (reverse water-filling) distortion: 2 log2(e) / (pi^2 R)."""
    _check_rate(R)
    return 2.0 * LOG2E / (math.pi ** 2 * R)


def dch(R: float, delta: float) -> float:
    """SOI over a channel with fixed delay delta: 1/(6R) + delta."""
    if delta < 0:
        raise ParameterError(f"delay must be non-negative, got {delta}")
    return dop(R) + delta


def soi_shift_distortion(R: float, shift: float) -> float:
    """
    SOI look-ahead decoder that moves each completed interval by shift*beta
    toward the next sample: (1/6 - shift/3 + shift^2) / R.

    Before the exit E[sign | F_t] = V_t / beta, so the cross term is
    E[sign * int V dt] / E[tau] = beta/6. shift = 0 is the causal hold,
    shift = 1/2 the midpoint decoder (1/(4R)), shift = 1/6 the minimum
    (5/(36R)).
    """
    _check_rate(R)
    return (1.0 / 6.0 - shift / 3.0 + shift ** 2) / R


def dop_f_rs(f: float, Rs: float) -> float:
    """Threshold sampling at frequency f with Rs bits per sample: 1/(6f)."""
    if f <= 0 or Rs < 1:
        raise ParameterError("need f > 0 and Rs >= 1")
    return 1.0 / (6.0 * f)


def closed_forms(R: float) -> ClosedForms:
    """
    All closed-form curves at rate R.

    Example:
        >>> forms = closed_forms(1.0)
        >>> forms.ddet / forms.dop
        5.0
    """
    _check_rate(R)
    return ClosedForms(
        R=R,
        dop=dop(R),
        ddet=ddet(R),
        dnoncausal=dnoncausal(R),
        soi_lookahead=1.0 / (12.0 * R),
        uniform_lookahead_sampling=1.0 / (6.0 * R),
        uniform_lookahead_total=1.0 / (2.0 * R),
    )

# ==================== Frequency / Bits Tradeoff ====================

def minimize_over_f_rs(R: float, which: Frontier = Frontier.ODFRF,
                       max_bits: int = MAX_BITS_PER_SAMPLE) -> Tuple[float, int, float]:
    """
    Grid search over Rs in {1..max_bits} with f = R/Rs; returns (f*, Rs*, value).
    Ties keep the smallest Rs.
    """
    if R < 1:
        raise ParameterError(f"need R >= 1 so that (f, Rs) = (R, 1) is feasible, got {R}")
    which = Frontier(which)
    best = None
    for Rs in range(1, max_bits + 1):
        f = R / Rs
        value = dop_f_rs(f, Rs) if which == Frontier.ODFRF else idrf_limit(f, Rs)
        if best is None or value < best[2]:
            best = (f, Rs, value)
    logger.debug(f"📝 {which.value} argmin at R={R}: f={best[0]}, Rs={best[1]}")
    return best


__all__ = [
    "dop",
    "ddet",
    "dnoncausal",
    "dch",
    "soi_shift_distortion",
    "dop_f_rs",
    "closed_forms",
    "minimize_over_f_rs",
]
