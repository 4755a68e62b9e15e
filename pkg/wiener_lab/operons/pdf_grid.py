#!/usr/bin/env python3
"""
Wiener Lab - Pdf Grid Operon
Piecewise-constant densities on equal-width cells: construction, exact
partial moments, and the two transforms the greedy compressor needs
(Gaussian convolution and the induced quantization-error density).
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import ndtr

from wiener_lab.config import PDF_BINS
from wiener_lab.constants import PDF_OVERFLOW_MASS, PDF_SUPPORT_SIGMAS, PDF_WIDEN_FACTOR
from wiener_lab.errors import NumericalError, ParameterError
from wiener_lab.types import PdfGrid, Quantizer

logger = logging.getLogger(__name__)

_CHUNK = 512


# ==================== Construction ====================

def from_masses(lo: float, hi: float, masses: np.ndarray) -> PdfGrid:
    """Build a normalized grid from per-cell masses."""
    masses = np.clip(np.asarray(masses, dtype=float), 0.0, None)
    total = masses.sum()
    if not np.isfinite(total) or total <= 0:
        raise NumericalError("pdf grid has no mass")
    width = (hi - lo) / masses.size
    return PdfGrid(lo=lo, hi=hi, densities=masses / (total * width))


def gaussian_pdf(mean: float, variance: float, bins: int = PDF_BINS,
                 sigmas: float = PDF_SUPPORT_SIGMAS) -> PdfGrid:
    """
    Cell-averaged Gaussian on mean +/- sigmas standard deviations.

    Example:
        >>> grid = gaussian_pdf(0.0, 1.0, bins=4096)
        >>> round(variance(grid), 4)
        1.0
    """
    if variance <= 0:
        raise ParameterError(f"Gaussian variance must be positive, got {variance}")
    sd = float(np.sqrt(variance))
    lo, hi = mean - sigmas * sd, mean + sigmas * sd
    edges = np.linspace(lo, hi, bins + 1)
    return from_masses(lo, hi, np.diff(ndtr((edges - mean) / sd)))


def uniform_pdf(lo: float, hi: float, bins: int = PDF_BINS) -> PdfGrid:
    return from_masses(lo, hi, np.ones(bins))


def point_mass(x: float, bins: int = 8, half_width: float = 1e-9) -> PdfGrid:
    """A narrow uniform block standing in for a Dirac mass at x."""
    return uniform_pdf(x - half_width, x + half_width, bins)


# ==================== Moments ====================

def center(pdf: PdfGrid) -> float:
    return 0.5 * (pdf.lo + pdf.hi)


def _cumulative_edge_moments(pdf: PdfGrid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = pdf.edges - center(pdf)
    p = pdf.densities
    m0 = np.concatenate(([0.0], np.cumsum(p * np.diff(u))))
    m1 = np.concatenate(([0.0], np.cumsum(p * np.diff(u ** 2) / 2.0)))
    m2 = np.concatenate(([0.0], np.cumsum(p * np.diff(u ** 3) / 3.0)))
    return m0, m1, m2


def partial_moments(pdf: PdfGrid, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Exact integrals of 1, u and u^2 against the density over [lo, x], where
    u = t - center(pdf). Points outside the support are clipped to it.
    """
    x = np.clip(np.asarray(x, dtype=float), pdf.lo, pdf.hi)
    c = center(pdf)
    edges = pdf.edges
    cell = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, pdf.bins - 1)
    m0, m1, m2 = _cumulative_edge_moments(pdf)
    p = pdf.densities[cell]
    ue = edges[cell] - c
    ux = x - c
    return (
        m0[cell] + p * (ux - ue),
        m1[cell] + p * (ux ** 2 - ue ** 2) / 2.0,
        m2[cell] + p * (ux ** 3 - ue ** 3) / 3.0,
    )


def cdf(pdf: PdfGrid, x) -> np.ndarray:
    cumulative = np.concatenate(([0.0], np.cumsum(pdf.masses)))
    return np.interp(np.asarray(x, dtype=float), pdf.edges, cumulative)


def mean(pdf: PdfGrid) -> float:
    m0, m1, _ = partial_moments(pdf, pdf.hi)
    return float(center(pdf) + m1 / m0)


def variance(pdf: PdfGrid) -> float:
    m0, m1, m2 = partial_moments(pdf, pdf.hi)
    mu = m1 / m0
    return float(max(m2 / m0 - mu ** 2, 0.0))


def total_variation(pdf: PdfGrid, reference_cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """TV distance between the grid density and a reference law given by its cdf."""
    ref = reference_cdf(pdf.edges)
    inside = np.abs(pdf.masses - np.diff(ref)).sum()
    outside = ref[0] + (1.0 - ref[-1])
    return float(0.5 * (inside + outside))


# ==================== Transforms ====================

def _psi(u: np.ndarray) -> np.ndarray:
    # antiderivative of the standard normal cdf
    return u * ndtr(u) + np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)


def _convolved_cdf(pdf: PdfGrid, points: np.ndarray, sd: float) -> np.ndarray:
    edges = pdf.edges
    a, b = edges[:-1], edges[1:]
    out = np.empty(points.size)
    exact = pdf.width / sd >= 1e-6
    for start in range(0, points.size, _CHUNK):
        e = points[start:start + _CHUNK, None]
        if exact:
            block = (_psi((e - a) / sd) - _psi((e - b) / sd)) * sd * pdf.densities
        else:
            block = ndtr((e - pdf.centers) / sd) * pdf.masses
        out[start:start + _CHUNK] = block.sum(axis=1)
    return out


def innovation_prior_update(error_pdf: PdfGrid, increment_variance: float,
                            bins: Optional[int] = None) -> PdfGrid:
    """
    Convolve the quantization-error density with a N(0, increment_variance)
    increment. The output grid is re-centered on the new mean and spans
    PDF_SUPPORT_SIGMAS standard deviations; if more than PDF_OVERFLOW_MASS
    falls outside, the grid is widened once.
    """
    if increment_variance <= 0:
        raise ParameterError(f"increment variance must be positive, got {increment_variance}")
    bins = bins or error_pdf.bins
    sd = float(np.sqrt(increment_variance))
    mu = mean(error_pdf)
    half = PDF_SUPPORT_SIGMAS * float(np.sqrt(variance(error_pdf) + increment_variance))

    for attempt in range(2):
        lo, hi = mu - half, mu + half
        F = _convolved_cdf(error_pdf, np.linspace(lo, hi, bins + 1), sd)
        overflow = F[0] + (1.0 - F[-1])
        if overflow <= PDF_OVERFLOW_MASS:
            return from_masses(lo, hi, np.diff(F))
        logger.warning(f"⚠️ Prior grid overflow {overflow:.2e}, widening support (attempt {attempt + 1})")
        half *= PDF_WIDEN_FACTOR
    raise NumericalError(f"pdf grid overflow {overflow:.2e} persists after widening")


def induced_error_pdf(prior: PdfGrid, q: Quantizer, bins: Optional[int] = None) -> PdfGrid:
    """
    Density of X - q(X) for X ~ prior: the mass of every quantizer cell is
    translated by its representative and accumulated on a common grid.
    """
    bins = bins or prior.bins
    lower = np.concatenate(([prior.lo], np.clip(q.boundaries, prior.lo, prior.hi)))
    upper = np.concatenate((np.clip(q.boundaries, prior.lo, prior.hi), [prior.hi]))
    F_lower, F_upper = cdf(prior, lower), cdf(prior, upper)
    occupied = F_upper - F_lower > 0
    if not np.any(occupied):
        raise NumericalError("quantizer cells carry no prior mass")

    shifted_lo = (lower - q.representatives)[occupied].min()
    shifted_hi = (upper - q.representatives)[occupied].max()
    if shifted_hi - shifted_lo <= 0:
        shifted_lo, shifted_hi = shifted_lo - 1e-12, shifted_hi + 1e-12

    out_edges = np.linspace(shifted_lo, shifted_hi, bins + 1)
    F = np.zeros(out_edges.size)
    for k in np.flatnonzero(occupied):
        moved = cdf(prior, out_edges + q.representatives[k])
        F += np.clip(moved, F_lower[k], F_upper[k]) - F_lower[k]
    return from_masses(shifted_lo, shifted_hi, np.diff(F))
