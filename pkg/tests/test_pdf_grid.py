# tests/test_pdf_grid.py

import numpy as np
import pytest
from scipy.stats import norm

from wiener_lab.errors import NumericalError, ParameterError
from wiener_lab.operons.pdf_grid import (
    cdf,
    from_masses,
    gaussian_pdf,
    induced_error_pdf,
    innovation_prior_update,
    mean,
    partial_moments,
    point_mass,
    total_variation,
    uniform_pdf,
    variance,
)
from wiener_lab.types import Quantizer

BINS = 1024


class TestConstruction:
    """Building and reading pdf grids"""

    def test_gaussian_moments(self):
        grid = gaussian_pdf(0.3, 2.0, bins=4096)
        assert grid.masses.sum() == pytest.approx(1.0, abs=1e-12)
        assert mean(grid) == pytest.approx(0.3, abs=1e-9)
        assert variance(grid) == pytest.approx(2.0, rel=1e-4)

    def test_uniform_partial_moments_are_exact(self):
        grid = uniform_pdf(0.0, 1.0, bins=16)
        m0, m1, m2 = partial_moments(grid, 0.3)
        # coordinates are centered on 0.5
        assert float(m0) == pytest.approx(0.3, abs=1e-12)
        assert float(m1) == pytest.approx((0.2 ** 2 - 0.5 ** 2) / 2, abs=1e-12)
        assert float(m2) == pytest.approx((-(0.2 ** 3) + 0.5 ** 3) / 3, abs=1e-12)
        assert variance(grid) == pytest.approx(1 / 12, abs=1e-12)

    def test_cdf_is_clipped_outside_support(self):
        grid = uniform_pdf(-1.0, 1.0, bins=8)
        assert np.allclose(cdf(grid, [-5.0, 0.0, 5.0]), [0.0, 0.5, 1.0])

    def test_rejects_empty_or_degenerate_input(self):
        with pytest.raises(NumericalError, match="no mass"):
            from_masses(0.0, 1.0, np.zeros(8))
        with pytest.raises(ParameterError, match="variance"):
            gaussian_pdf(0.0, 0.0)


class TestPriorUpdate:
    """Convolution with a Gaussian increment"""

    def test_point_mass_becomes_gaussian(self):
        """delta_0 convolved with N(0, 1) matches the normal law within TV 1e-3"""
        updated = innovation_prior_update(point_mass(0.0), 1.0, bins=BINS)
        assert total_variation(updated, norm.cdf) < 1e-3

    def test_gaussian_convolution_adds_variances(self):
        prior = gaussian_pdf(0.0, 0.5, bins=BINS)
        updated = innovation_prior_update(prior, 0.7)
        reference = norm(loc=0.0, scale=np.sqrt(1.2)).cdf
        assert total_variation(updated, reference) < 1e-3
        assert variance(updated) == pytest.approx(1.2, rel=1e-3)

    def test_mass_is_preserved(self):
        updated = innovation_prior_update(uniform_pdf(-0.4, 0.1, bins=64), 0.3, bins=BINS)
        assert updated.masses.sum() == pytest.approx(1.0, abs=1e-9)
        assert mean(updated) == pytest.approx(-0.15, abs=1e-6)

    def test_rejects_non_positive_variance(self):
        with pytest.raises(ParameterError, match="increment variance"):
            innovation_prior_update(point_mass(0.0), 0.0)


class TestInducedError:
    """Density of X - q(X)"""

    def setup_method(self):
        self.prior = uniform_pdf(0.0, 1.0, bins=BINS)
        self.quantizer = Quantizer(
            boundaries=[0.5],
            representatives=[0.25, 0.75],
            expected_sq_error=1 / 48,
            cell_probabilities=[0.5, 0.5],
        )

    def test_uniform_two_cell_error(self):
        """U[0,1] with cells at 0.5 leaves a U[-1/4, 1/4] error"""
        error = induced_error_pdf(self.prior, self.quantizer)
        assert error.lo == pytest.approx(-0.25, abs=1e-12)
        assert error.hi == pytest.approx(0.25, abs=1e-12)
        assert mean(error) == pytest.approx(0.0, abs=1e-12)
        assert variance(error) == pytest.approx(1 / 48, abs=1e-9)

    def test_point_mass_on_a_representative(self):
        quantizer = Quantizer(
            boundaries=[0.0],
            representatives=[-1.0, 1.0],
            expected_sq_error=0.0,
            cell_probabilities=[0.0, 1.0],
        )
        error = induced_error_pdf(point_mass(1.0), quantizer)
        assert abs(error.lo) < 1e-8
        assert abs(error.hi) < 1e-8
        assert abs(mean(error)) < 1e-8

    def test_error_then_update_tracks_variance(self):
        """Var(error) + increment variance = Var(next prior)"""
        error = induced_error_pdf(self.prior, self.quantizer)
        updated = innovation_prior_update(error, 1.0)
        assert variance(updated) == pytest.approx(variance(error) + 1.0, rel=1e-3)
