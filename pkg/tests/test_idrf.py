# tests/test_idrf.py

import math

import numpy as np
import pytest

from wiener_lab.constants import LOG2E, Frontier
from wiener_lab.errors import InputError, NumericalError, ParameterError
from wiener_lab.idrf.closed_forms import (
    closed_forms,
    dch,
    ddet,
    dnoncausal,
    dop,
    dop_f_rs,
    minimize_over_f_rs,
    soi_shift_distortion,
)
from wiener_lab.idrf.finite_n import (
    bound_objective,
    dn_objective,
    idrf_limit,
    interior_objective,
    limit_multiplier,
    lower_bound_dn,
    optimal_distortions,
    solve_lambda,
    symmetric_allocation,
    uniform_allocation,
    upper_bound_dn,
    z_of,
)
from wiener_lab.types import DistortionAllocation, IntervalAllocation

TRIPLES = [(f, Rs, N) for f in (0.5, 1.0, 2.0) for Rs in (1, 2) for N in (3, 10, 50, 200, 1000)]


class TestObjective:
    """z and the finite-N objective"""

    def test_z_examples(self):
        assert z_of([1.0, 1.0], [1.0, 1.0, 1.0]) == pytest.approx(0.5)
        assert z_of([1.0], [4.0, 1.0]) == pytest.approx(2.0)
        assert z_of(DistortionAllocation(D=[0.5, 0.5]), IntervalAllocation(T=[1.0, 1.0, 1.0])) == pytest.approx(
            (math.log2(3.0) + 1.0) / 2
        )

    def test_z_decreases_in_each_distortion(self):
        T = np.array([0.8, 1.1, 0.9, 1.2])
        D = np.array([0.3, 0.4, 0.5])
        base = z_of(D, T)
        for i in range(D.size):
            bumped = D.copy()
            bumped[i] *= 1.01
            assert z_of(bumped, T) < base

    def test_z_input_errors(self):
        with pytest.raises(InputError, match="N\\+1 intervals"):
            z_of([1.0, 1.0], [1.0, 1.0])
        with pytest.raises(NumericalError, match="diverges"):
            z_of([0.0, 1.0], [1.0, 1.0, 1.0])

    def test_dn_objective_examples(self):
        f, N = 2.0, 3
        T = np.full(N + 1, 1.0 / f)
        assert dn_objective(T, np.zeros(N), f) == pytest.approx((N + 1) / (2 * f * N))
        assert dn_objective(np.zeros(N + 1), np.zeros(N), f) == 0.0
        D = np.array([0.1, 0.2, 0.3])
        doubled = dn_objective(T, 2 * D, f) - dn_objective(T, D, f)
        assert doubled == pytest.approx(f / N * np.dot(T[1:], D))


class TestMultiplier:
    """Lagrange multiplier search"""

    def test_complementary_slackness(self):
        T = uniform_allocation(1.0, 20)
        lambda_star, D = solve_lambda(T, 1)
        assert lambda_star > 0
        assert z_of(D, T) == pytest.approx(2.0, abs=1e-9)

    def test_z_is_monotone_in_the_multiplier(self):
        T = uniform_allocation(1.0, 10)
        values = [z_of(optimal_distortions(T, lam), T) for lam in np.logspace(-6, 3, 40)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_large_n_multiplier(self):
        """lambda* log2 e -> 4/9 at f = 1, Rs = 1"""
        lambda_star, _ = solve_lambda(uniform_allocation(1.0, 10_000), 1)
        assert lambda_star * LOG2E == pytest.approx(4 / 9, rel=0.01)
        assert limit_multiplier(1.0, 1) == pytest.approx(4 / 9)

    def test_many_bits_shrink_the_multiplier(self):
        lambda_star, D = solve_lambda(uniform_allocation(1.0, 20), 20)
        assert lambda_star < 1e-10
        assert np.all(D.D < 1e-10)

    @pytest.mark.parametrize("N", [3, 10, 100])
    def test_multiplier_bound(self, N):
        f = 1.0
        lambda_star, _ = solve_lambda(uniform_allocation(f, N), 1)
        assert lambda_star * LOG2E <= N ** 2 / (2 * f ** 2 * (N + 1) ** 2)

    def test_rejects_bad_intervals(self):
        with pytest.raises(ParameterError, match="T_0, T_N > 0"):
            solve_lambda([0.0, 1.0, 1.0], 1)
        with pytest.raises(ParameterError, match="bits per sample"):
            solve_lambda([1.0, 1.0], 0.5)


class TestBounds:
    """Finite-N lower and upper bounds"""

    @pytest.mark.parametrize("f,Rs,N", TRIPLES)
    def test_lower_never_exceeds_upper(self, f, Rs, N):
        lower = lower_bound_dn(f, Rs, N)
        upper = upper_bound_dn(f, Rs, N)
        assert lower.value <= upper.value * (1 + 1e-9)

    @pytest.mark.parametrize("N", [3, 10, 100])
    def test_uniform_allocation_is_feasible(self, N):
        solution = upper_bound_dn(1.0, 1, N)
        assert solution.distortions.is_feasible(solution.allocation, rtol=1e-9)
        assert solution.allocation.f == pytest.approx(1.0)

    @pytest.mark.parametrize("f,Rs", [(f, Rs) for f in (0.5, 1.0, 2.0) for Rs in (1, 2)])
    def test_bounds_converge_to_the_limit(self, f, Rs):
        limit = idrf_limit(f, Rs)
        upper = [upper_bound_dn(f, Rs, N).value for N in (100, 1000, 10_000)]
        lower = [lower_bound_dn(f, Rs, N).value for N in (100, 1000, 10_000)]
        assert upper[-1] == pytest.approx(limit, rel=0.01)
        assert lower[-1] == pytest.approx(limit, rel=0.01)
        gaps = [abs(u - limit) for u in upper]
        assert gaps[0] > gaps[1] > gaps[2]
        assert abs(lower[-1] - limit) < abs(lower[0] - limit)

    def test_more_bits_lower_the_bound(self):
        values = [upper_bound_dn(1.0, Rs, 50).value for Rs in (1, 2, 3, 4)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_asymmetric_search_does_not_raise_the_bound(self):
        symmetric = lower_bound_dn(1.0, 1, 50)
        audited = lower_bound_dn(1.0, 1, 50, symmetric=False)
        assert audited.value <= symmetric.value + 1e-12

    def test_parameter_checks(self):
        with pytest.raises(ParameterError, match="N must be >= 2"):
            lower_bound_dn(1.0, 1, 1)
        with pytest.raises(ParameterError, match="frequency"):
            upper_bound_dn(0.0, 1, 10)
        with pytest.raises(ParameterError, match="exceeds"):
            upper_bound_dn(1.0, 1, 10**9)


class TestSchurConvexity:
    """Equal interior intervals minimize the interior objective"""

    def setup_method(self):
        self.N = 20
        self.T = uniform_allocation(1.0, self.N)
        self.lambda_star, _ = solve_lambda(self.T, 1)

    def test_perturbation_raises_interior_objective(self):
        interior = self.T[1:-1]
        base = interior_objective(interior, self.lambda_star)
        rng = np.random.default_rng(0)
        for _ in range(20):
            delta = rng.normal(0.0, 0.01, interior.size)
            delta -= delta.mean()
            assert interior_objective(interior + delta, self.lambda_star) >= base

    def test_symmetric_endpoints_keep_the_horizon(self):
        T = symmetric_allocation(1.0, self.N, 0.3)
        assert T.sum() == pytest.approx(self.N)
        assert T[0] == T[-1] == 0.3

    def test_bound_objective_matches_upper_bound(self):
        solution = upper_bound_dn(1.0, 1, self.N)
        assert bound_objective(self.T, 1.0, 1) == pytest.approx(solution.value, rel=1e-12)


class TestClosedForms:
    """Closed-form curves and the (f, Rs) tradeoff"""

    def test_limit_values(self):
        assert idrf_limit(1.0, 1) == pytest.approx(5 / 6)
        assert idrf_limit(2.0, 1) == pytest.approx(5 / 12)
        assert idrf_limit(1.0, 30) == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("R", [0.5, 1.0, 3.0, 10.0])
    def test_ratios(self, R):
        assert ddet(R) / dop(R) == pytest.approx(5.0)
        assert dop(R) / dnoncausal(R) == pytest.approx(0.57, abs=0.005)
        assert dch(R, 0.0) == dop(R)
        assert dch(R, 0.25) == pytest.approx(dop(R) + 0.25)

    def test_soi_shift_distortion(self):
        assert soi_shift_distortion(2.0, 0.0) == pytest.approx(dop(2.0))
        assert soi_shift_distortion(1.0, 0.5) == pytest.approx(1 / 4)
        assert soi_shift_distortion(1.0, 1 / 6) == pytest.approx(5 / 36)
        shifts = np.linspace(0.0, 0.5, 301)
        values = [soi_shift_distortion(1.0, c) for c in shifts]
        assert shifts[int(np.argmin(values))] == pytest.approx(1 / 6, abs=1e-3)

    def test_closed_form_record(self):
        forms = closed_forms(2.0)
        assert forms.dop == pytest.approx(1 / 12)
        assert forms.ddet == pytest.approx(5 / 12)
        assert forms.soi_lookahead == pytest.approx(1 / 24)
        assert forms.uniform_lookahead_total == pytest.approx(1 / 4)
        assert forms.dop_f_rs(2.0) == pytest.approx(dop_f_rs(2.0, 1))

    def test_minimize_over_f_rs(self):
        f, Rs, value = minimize_over_f_rs(3.0, Frontier.ODFRF)
        assert (f, Rs) == (3.0, 1)
        assert value == pytest.approx(1 / 18)
        f, Rs, value = minimize_over_f_rs(3.0, Frontier.IDFRF)
        assert (f, Rs) == (3.0, 1)
        assert value == pytest.approx(5 / 18)

    @pytest.mark.parametrize("R", [2.0, 4.0, 8.0])
    @pytest.mark.parametrize("which", [Frontier.ODFRF, Frontier.IDFRF])
    def test_one_bit_per_sample_wins(self, R, which):
        f, Rs, _ = minimize_over_f_rs(R, which)
        assert (f, Rs) == (R, 1)

    def test_minimize_requires_rate_one(self):
        with pytest.raises(ParameterError, match="R >= 1"):
            minimize_over_f_rs(0.5)

    def test_rejects_non_positive_rate(self):
        with pytest.raises(ParameterError, match="rate"):
            dop(0.0)
        with pytest.raises(ParameterError, match="delay"):
            dch(1.0, -0.1)
