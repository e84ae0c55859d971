import numpy as np
import pytest

import wavewell as ww
from conftest import random_state, smooth_random_field


def ground_state(grid):
    """sqrt(2) sech(x): stationary solution of (1 - d^2/dx^2) phi = phi^3."""
    return ww.RealField(grid, np.sqrt(2.0) / np.cosh(grid.nodes))


class TestDispersivePart:
    def test_zero_field(self, dd_model, grid30):
        zero = ww.RealField(grid30, np.zeros(grid30.n_modes))
        assert ww.dispersive_energy(zero, dd_model) == 0.0

    def test_ground_state_value_and_quadrature_oracle(self, dd_model, grid30_fine):
        # independent oracle: for this model I(u) = 1/2 * integral(u^2 + u_x^2)
        # with the analytic derivative of sqrt(2) sech
        u = ground_state(grid30_fine)
        x = grid30_fine.nodes
        ux = -np.sqrt(2.0) * np.tanh(x) / np.cosh(x)
        oracle = 0.5 * grid30_fine.spacing * np.sum(u.samples**2 + ux**2)
        value = ww.dispersive_energy(u, dd_model)
        assert value == pytest.approx(oracle, rel=1e-10)
        assert value == pytest.approx(8.0 / 3.0, rel=1e-6)

    def test_quadratic_homogeneity(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        base = ww.dispersive_energy(u, dd_model)
        for lam in (0.5, 2.0, 3.0):
            scaled = ww.RealField(grid30, lam * u.samples)
            assert ww.dispersive_energy(scaled, dd_model) == pytest.approx(lam**2 * base, rel=1e-12)


class TestPowerIntegral:
    def test_zero_field(self, grid30):
        zero = ww.RealField(grid30, np.zeros(grid30.n_modes))
        assert ww.power_integral(zero, 3.0) == 0.0

    def test_ground_state_value(self, grid30):
        # 4 * integral(sech^4) = 4 * 4/3
        u = ground_state(grid30)
        assert ww.power_integral(u, 3.0) == pytest.approx(16.0 / 3.0, rel=1e-8)

    def test_power_homogeneity(self, grid30, rng):
        p = 3.0
        u = smooth_random_field(grid30, rng)
        base = ww.power_integral(u, p)
        for lam in (0.5, 2.0, 3.0):
            scaled = ww.RealField(grid30, lam * u.samples)
            assert ww.power_integral(scaled, p) == pytest.approx(lam ** (p + 1) * base, rel=1e-12)


class TestShiftedDispersivePart:
    def test_zero_shift_is_plain(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        assert ww.dispersive_energy(u, dd_model, 0.0) == ww.dispersive_energy(u, dd_model)

    def test_strictly_smaller_for_nonzero_shift(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        assert ww.dispersive_energy(u, dd_model, 0.3) < ww.dispersive_energy(u, dd_model)

    def test_zero_field_for_any_shift(self, dd_model, grid30):
        zero = ww.RealField(grid30, np.zeros(grid30.n_modes))
        for gamma in (-0.5, 0.25, 0.9):
            assert ww.dispersive_energy(zero, dd_model, gamma) == 0.0

    def test_shift_outside_coercive_range(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        with pytest.raises(ValueError, match="coercive range"):
            ww.dispersive_energy(u, dd_model, 1.0)

    def test_positive_under_the_shift_bound(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        assert ww.dispersive_energy(u, dd_model, 0.99) > 0.0


class TestEnergyMomentum:
    def test_zero_state(self, dd_model, grid30):
        zero = ww.RealField(grid30, np.zeros(grid30.n_modes))
        breakdown = ww.energy(ww.StateUW(zero, zero, dd_model))
        assert (breakdown.kinetic, breakdown.dispersive, breakdown.nonlinear,
                breakdown.total, breakdown.momentum) == (0, 0, 0, 0, 0)

    def test_ground_state_total(self, dd_model, grid30_fine):
        u = ground_state(grid30_fine)
        zero = ww.RealField(grid30_fine, np.zeros(grid30_fine.n_modes))
        breakdown = ww.energy(ww.StateUW(u, zero, dd_model))
        assert breakdown.total == pytest.approx(4.0 / 3.0, rel=1e-6)

    def test_breakdown_sums_exactly(self, dd_model, grid30, rng):
        state = random_state(grid30, dd_model, rng)
        b = ww.energy(state)
        assert b.total == b.kinetic + b.dispersive - b.nonlinear
        assert b.kinetic >= 0 and b.dispersive >= 0 and b.nonlinear >= 0

    def test_momentum_of_equal_fields_is_weighted_norm(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        state = ww.StateUW(u, u, dd_model)
        m = ww.momentum(state)
        xi = grid30.wavenumbers
        b_vals = ww.symbol_at(dd_model.B, xi)
        norm_sq = ww.grid.mode_norm_sq(u, 1.0 / b_vals)
        assert m >= 0
        assert m == pytest.approx(norm_sq, rel=1e-12)

    def test_potential_energy_is_static_energy(self, dd_model, grid30, rng):
        u = smooth_random_field(grid30, rng)
        zero = ww.RealField(grid30, np.zeros(grid30.n_modes))
        total = ww.energy(ww.StateUW(u, zero, dd_model)).total
        assert ww.potential_energy(u, dd_model) == pytest.approx(total, rel=1e-14)

    def test_states_need_matching_grids(self, dd_model, grid30):
        other = ww.GridSpec(30.0, 512)
        with pytest.raises(ValueError, match="grid"):
            ww.StateUW(
                ww.RealField(grid30, np.zeros(grid30.n_modes)),
                ww.RealField(other, np.zeros(other.n_modes)),
                dd_model,
            )


class TestAugmentedEnergy:
    def test_zero_shift_equals_energy(self, dd_model, grid30, rng):
        state = random_state(grid30, dd_model, rng)
        assert ww.augmented_energy(state, 0.0) == ww.energy(state).total

    def test_completed_square_identity(self, dd_model, grid30, rng):
        # c1 = 1 for this model, so the shifts below stay coercive
        for gamma in (0.3, -0.3, 0.6, -0.6):
            for _ in range(5):
                state = random_state(grid30, dd_model, rng)
                lhs = ww.augmented_energy(state, gamma)
                rhs = ww.augmented_energy_shifted(state, gamma)
                assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    def test_pure_flux_state(self, dd_model, grid30, rng):
        w = smooth_random_field(grid30, rng)
        zero = ww.RealField(grid30, np.zeros(grid30.n_modes))
        state = ww.StateUW(zero, w, dd_model)
        xi = grid30.wavenumbers
        kinetic = 0.5 * ww.grid.mode_norm_sq(w, 1.0 / ww.symbol_at(dd_model.B, xi))
        for gamma in (0.0, 0.4, -0.4):
            assert ww.augmented_energy(state, gamma) == pytest.approx(kinetic, rel=1e-12)


class TestNonlinearity:
    @pytest.mark.parametrize("p", [3.0, 2.5])
    def test_growth_condition_with_quarter_exponent(self, p, rng):
        # u*g(u) = 2*(1 + 2*nu)*G(u) holds pointwise with nu = (p-1)/4
        u = rng.standard_normal(512) * 3.0
        nu = (p - 1.0) / 4.0
        lhs = u * ww.power_nonlinearity(u, p)
        rhs = 2.0 * (1.0 + 2.0 * nu) * ww.power_primitive(u, p)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-13)

    def test_nonlinearity_vanishes_at_zero(self):
        vals = ww.power_nonlinearity(np.array([0.0, -0.0]), 2.5)
        assert np.array_equal(vals, np.array([0.0, 0.0]))

    def test_sign_and_oddness(self, rng):
        u = rng.standard_normal(128)
        g = ww.power_nonlinearity(u, 3.0)
        np.testing.assert_allclose(g, -(u**3), rtol=1e-13)
        np.testing.assert_allclose(ww.power_nonlinearity(-u, 3.0), -g, rtol=1e-13)


class TestSpaceEquivalence:
    def test_dispersive_part_good_boussinesq(self, rng):
        # l/b = 1 + xi^2 exactly, so I(u) = 1/2 integral(u^2 + u_x^2) with an
        # analytic-derivative quadrature oracle
        model = ww.good_boussinesq(1.0, 3.0)
        grid = ww.GridSpec(30.0, 2048)
        x = grid.nodes
        u_samples = np.exp(-(x**2) / 4.0)
        ux = -0.5 * x * np.exp(-(x**2) / 4.0)
        oracle = 0.5 * grid.spacing * np.sum(u_samples**2 + ux**2)
        value = ww.dispersive_energy(ww.RealField(grid, u_samples), model)
        assert value == pytest.approx(oracle, rel=1e-10)

    def test_momentum_double_dispersion(self, dd_model):
        # 1/b = 1 + xi^2, so M = integral(u w + u_x w_x) after integration by parts
        grid = ww.GridSpec(30.0, 2048)
        x = grid.nodes
        u_samples = np.exp(-(x**2) / 4.0)
        w_samples = x * np.exp(-(x**2) / 6.0)
        ux = -0.5 * x * u_samples
        wx = (1.0 - x**2 / 3.0) * np.exp(-(x**2) / 6.0)
        oracle = grid.spacing * np.sum(u_samples * w_samples + ux * wx)
        state = ww.StateUW(ww.RealField(grid, u_samples), ww.RealField(grid, w_samples), dd_model)
        assert ww.momentum(state) == pytest.approx(oracle, rel=1e-10)
