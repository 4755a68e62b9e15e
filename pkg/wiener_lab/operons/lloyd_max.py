#!/usr/bin/env python3
"""
Wiener Lab - Lloyd-Max Operon
Scalar quantizer design for a density on a pdf grid. Starts from
equal-probability cells and alternates centroid and midpoint updates,
with every integral evaluated exactly on the piecewise-constant density.
"""

import logging
from typing import Tuple

import numpy as np

from wiener_lab.config import LLOYD_MAX_ITER, LLOYD_TOL
from wiener_lab.errors import NumericalError, ParameterError
from wiener_lab.operons.pdf_grid import center, partial_moments
from wiener_lab.types import PdfGrid, Quantizer

logger = logging.getLogger(__name__)

_EMPTY_MASS = 1e-300


def _inverse_cdf(pdf: PdfGrid, targets: np.ndarray) -> np.ndarray:
    cumulative = np.concatenate(([0.0], np.cumsum(pdf.masses)))
    return np.interp(targets, cumulative, pdf.edges)


def quantile_boundaries(pdf: PdfGrid, levels: int) -> np.ndarray:
    """Interior boundaries splitting the mass into `levels` equal parts."""
    return _inverse_cdf(pdf, np.linspace(0.0, 1.0, levels + 1)[1:-1])


def _cells(pdf: PdfGrid, boundaries: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    points = np.concatenate(([pdf.lo], boundaries, [pdf.hi]))
    m0, m1, m2 = partial_moments(pdf, points)
    return np.diff(m0), np.diff(m1), np.diff(m2)


def _repair_empty_cells(pdf: PdfGrid, boundaries: np.ndarray) -> np.ndarray:
    """Merge each empty cell with a neighbour and re-split the pair at its median."""
    boundaries = boundaries.copy()
    for _ in range(boundaries.size + 1):
        mass, _, _ = _cells(pdf, boundaries)
        empty = np.flatnonzero(mass <= _EMPTY_MASS)
        if empty.size == 0:
            return boundaries
        k = int(empty[0])
        neighbour = k + 1 if k == 0 or (k + 1 < mass.size and mass[k + 1] >= mass[k - 1]) else k - 1
        left, right = min(k, neighbour), max(k, neighbour)
        points = np.concatenate(([pdf.lo], boundaries, [pdf.hi]))
        cumulative = np.concatenate(([0.0], np.cumsum(pdf.masses)))
        F = np.interp(points[[left, right + 1]], pdf.edges, cumulative)
        boundaries[left] = _inverse_cdf(pdf, np.array([F.mean()]))[0]
        logger.debug(f"📝 Re-split empty Lloyd-Max cell {k} with neighbour {neighbour}")
    raise NumericalError("Lloyd-Max cells stay empty: the density has too little support")


def _evaluate(pdf: PdfGrid, boundaries: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Centroids (centered coordinates), cell masses and expected squared error."""
    mass, first, second = _cells(pdf, boundaries)
    if np.any(mass <= _EMPTY_MASS):
        raise NumericalError("Lloyd-Max produced an empty cell")
    reps = first / mass
    error = float(np.sum(second - 2.0 * reps * first + reps ** 2 * mass))
    return reps, mass, max(error, 0.0)


def lloyd_max(pdf: PdfGrid, levels: int, tol: float = LLOYD_TOL,
              max_iter: int = LLOYD_MAX_ITER) -> Quantizer:
    """
    Design an M-level quantizer minimizing the expected squared error.

    Stops once the expected error decreases by less than `tol`. If
    `max_iter` is reached the best quantizer is returned with
    converged=False.

    Example:
        >>> q = lloyd_max(gaussian_pdf(0.0, 1.0), 2)
        >>> np.round(q.representatives, 3)
        array([-0.798,  0.798])
    """
    if levels < 2 or levels & (levels - 1):
        raise ParameterError(f"levels must be a power of two >= 2, got {levels}")

    c = center(pdf)
    boundaries = _repair_empty_cells(pdf, quantile_boundaries(pdf, levels))
    reps, mass, error = _evaluate(pdf, boundaries)
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        candidate = 0.5 * (reps[:-1] + reps[1:]) + c
        repaired = _repair_empty_cells(pdf, candidate)
        new_reps, new_mass, new_error = _evaluate(pdf, repaired)
        if repaired is candidate or np.array_equal(repaired, candidate):
            if new_error > error * (1.0 + 1e-9) + 1e-15:
                raise NumericalError(
                    f"Lloyd-Max error increased from {error!r} to {new_error!r}"
                )
        boundaries, reps, mass = repaired, new_reps, new_mass
        change = error - new_error
        error = new_error
        if abs(change) < tol:
            converged = True
            break

    if not converged:
        logger.warning(f"⚠️ Lloyd-Max did not converge after {max_iter} iterations (error {error:.6g})")

    return Quantizer(
        boundaries=boundaries,
        representatives=reps + c,
        expected_sq_error=error,
        cell_probabilities=mass / mass.sum(),
        iterations=iterations,
        converged=converged,
    )


__all__ = ["lloyd_max", "quantile_boundaries"]
