import numpy as np
import pytest

from ptlab.errors import IntegrationOverflow, ZeroMomentum
from ptlab.models.grid import Grid, Wavefunction
from ptlab.potential import scarf2
from ptlab.schrodinger import (
    Direction,
    Propagator,
    chain_product,
    extract_coefficients,
    fundamental_pair,
    integrate,
    plane_wave_coefficients,
    wronskian,
    write_wavefunction_csv,
)


@pytest.fixture
def free():
    return scarf2(0.0, 0.0)


def _free_error(spec, grid, energy):
    k = np.sqrt(energy)
    w = integrate(spec, energy, grid, -grid.half_width, (1.0, 1j * k), Direction.FORWARD)
    return np.max(np.abs(w.psi - np.exp(1j * k * (grid.x + grid.half_width))))


class TestIntegrate:
    """RK4 integration of -psi'' + V psi = E psi"""

    def test_free_plane_wave(self, free):
        assert _free_error(free, Grid(10.0, 20001), 1.0) < 1e-8

    def test_fourth_order_convergence(self, free):
        coarse = _free_error(free, Grid(10.0, 201), 4.0)
        fine = _free_error(free, Grid(10.0, 401), 4.0)
        assert 12.0 < coarse / fine < 20.0

    def test_partial_span_is_nan_outside(self, free):
        grid = Grid(5.0, 1001)
        w = integrate(free, 1.0, grid, -5.0, (1.0, 1j), Direction.FORWARD, x_stop=0.0)
        assert w.span == (0, grid.center_index)
        assert not w.is_complete
        assert np.all(np.isnan(w.psi[grid.center_index + 1:]))
        assert np.all(np.isfinite(w.psi[:grid.center_index + 1]))

    def test_backward_from_right_edge(self, free):
        grid = Grid(5.0, 2001)
        w = integrate(free, 1.0, grid, 5.0, (1.0, -1j), Direction.BACKWARD)
        assert w.is_complete
        assert np.max(np.abs(w.psi - np.exp(-1j * (grid.x - 5.0)))) < 1e-8

    def test_zero_initial_data(self, free):
        with pytest.raises(ValueError):
            integrate(free, 1.0, Grid(1.0, 11), -1.0, (0.0, 0.0), Direction.FORWARD)

    def test_stop_behind_start(self, free):
        with pytest.raises(ValueError, match="behind"):
            integrate(free, 1.0, Grid(1.0, 11), 0.0, (1.0, 0.0), Direction.FORWARD, x_stop=-0.4)

    def test_growing_solution_overflows(self, free):
        grid = Grid(50.0, 20001)
        with pytest.raises(IntegrationOverflow):
            integrate(free, -100.0, grid, -50.0, (1.0, 10.0), Direction.FORWARD)
        w = integrate(free, -100.0, grid, -50.0, (1.0, 10.0), Direction.FORWARD, rescale=True)
        assert np.all(np.isfinite(w.psi))
        assert np.max(np.abs(w.psi)) <= 1e300

    def test_deterministic(self, generic_scarf, fast_grid):
        grid = fast_grid(generic_scarf)
        first = integrate(generic_scarf, 2.0 + 0.5j, grid, -grid.half_width, (1.0, 0.3j), Direction.FORWARD)
        second = integrate(generic_scarf, 2.0 + 0.5j, grid, -grid.half_width, (1.0, 0.3j), Direction.FORWARD)
        assert np.array_equal(first.psi, second.psi)


class TestFundamentalPair:

    def test_wronskian_is_constant(self, reflectionless, fast_grid):
        grid = fast_grid(reflectionless)
        k = 1.2
        right_mover, left_mover = fundamental_pair(reflectionless, 6.25 + k * k, grid)
        w = wronskian(right_mover, left_mover)
        assert np.max(np.abs(w - (-2j * k))) < 1e-8 * 2 * k

    def test_zero_momentum(self, reflectionless, fast_grid):
        with pytest.raises(ZeroMomentum):
            fundamental_pair(reflectionless, 6.25, fast_grid(reflectionless))


class TestPlaneWaveCoefficients:

    def test_recovers_combination(self):
        grid = Grid(5.0, 101)
        k = 1.3
        c_plus, c_minus = 2.0, 0.5 - 1.0j
        psi = c_plus * np.exp(1j * k * grid.x) + c_minus * np.exp(-1j * k * grid.x)
        dpsi = 1j * k * (c_plus * np.exp(1j * k * grid.x) - c_minus * np.exp(-1j * k * grid.x))
        w = Wavefunction(grid, psi, dpsi, k * k, k)
        got_plus, got_minus = extract_coefficients(w, 2.0, k)
        assert abs(got_plus - c_plus) < 1e-13
        assert abs(got_minus - c_minus) < 1e-13

    def test_zero_momentum(self):
        with pytest.raises(ZeroMomentum):
            plane_wave_coefficients(1.0, 0.0, 0.0, 0.0)


class TestTransferProducts:

    def test_chain_product_matches_sequential_product(self):
        rng = np.random.default_rng(7)
        n = 37
        mats = np.eye(2) + 0.3 * (rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2)))
        expected = np.eye(2, dtype=complex)
        for mat in mats:
            expected = mat @ expected
        mantissa, exponent = chain_product(mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1])
        assert np.max(np.abs(mantissa)) <= 1.0
        assert np.max(np.abs(mantissa * 2.0 ** exponent - expected)) < 1e-12 * np.max(np.abs(expected))

    def test_transfer_agrees_with_sequential_integration(self, generic_scarf, fast_grid):
        grid = fast_grid(generic_scarf)
        energy = 3.0 + 0.2j
        propagator = Propagator(generic_scarf, grid)
        mantissa, exponent = propagator.transfer(energy)
        end = mantissa * 2.0 ** exponent @ np.array([1.0, 0.5j])
        w = integrate(generic_scarf, energy, grid, -grid.half_width, (1.0, 0.5j), Direction.FORWARD, propagator=propagator)
        scale = max(abs(w.psi[-1]), abs(w.dpsi[-1]))
        assert abs(end[0] - w.psi[-1]) < 1e-10 * scale
        assert abs(end[1] - w.dpsi[-1]) < 1e-10 * scale

    def test_half_transfers_meet_at_the_origin(self, generic_scarf, fast_grid):
        grid = fast_grid(generic_scarf)
        energy = 0.5 + 0.1j
        propagator = Propagator(generic_scarf, grid)
        (left, left_exp), (right, right_exp) = propagator.half_transfers(energy)
        m = grid.center_index

        from_left = integrate(generic_scarf, energy, grid, -grid.half_width, (1.0, 1.0), Direction.FORWARD,
                              x_stop=0.0, propagator=propagator)
        expected = np.array([from_left.psi[m], from_left.dpsi[m]])
        got = left * 2.0 ** left_exp @ np.array([1.0, 1.0])
        assert np.max(np.abs(got - expected)) < 1e-10 * np.max(np.abs(expected))

        from_right = integrate(generic_scarf, energy, grid, grid.half_width, (1.0, -1.0), Direction.BACKWARD,
                               x_stop=0.0, propagator=propagator)
        expected = np.array([from_right.psi[m], from_right.dpsi[m]])
        got = right * 2.0 ** right_exp @ np.array([1.0, -1.0])
        assert np.max(np.abs(got - expected)) < 1e-10 * np.max(np.abs(expected))


def test_wavefunction_csv(tmp_path, free):
    grid = Grid(1.0, 11)
    w = integrate(free, 1.0, grid, -1.0, (1.0, 1j), Direction.FORWARD)
    path = write_wavefunction_csv(w, tmp_path / "psi.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "x,re_psi,im_psi,re_dpsi,im_dpsi"
    assert len(lines) == 12
