import numpy as np
import pytest
from scipy.integrate import trapezoid

from ptlab.correlation import (
    continuity_residual,
    correlation_density,
    correlation_field,
    current_constancy,
    nonlocal_inner_product,
    pt_current,
    pt_image,
    pt_overlap,
    write_correlation_csv,
)
from ptlab.errors import GridMismatch, IncompleteWavefunction, ZeroFunction
from ptlab.models.grid import Grid, Wavefunction
from ptlab.potential import ground_state_oracle
from ptlab.scattering import scattering_state
from ptlab.schrodinger import Direction, integrate
from ptlab.spectrum import eigenfunction, pole_candidates


def _broken_energy(spec):
    return pole_candidates(spec)["family1"][0].energy


class TestPtImage:

    def test_image_of_gaussian_packet(self):
        grid = Grid(4.0, 81)
        psi = np.exp(-(grid.x - 0.5) ** 2 + 0.3j * grid.x)
        dpsi = (-2 * (grid.x - 0.5) + 0.3j) * psi
        w = Wavefunction(grid, psi, dpsi, 1.0, 1.0)
        phi, dphi = pt_image(w)
        expected = np.conj(np.exp(-(-grid.x - 0.5) ** 2 - 0.3j * grid.x))
        assert np.allclose(phi, expected, atol=1e-14)
        assert np.allclose(correlation_density(w), expected * psi, atol=1e-14)
        assert np.allclose(pt_current(w), psi * dphi - phi * dpsi)

    def test_needs_complete_wavefunction(self):
        grid = Grid(1.0, 11)
        psi = np.ones(11, dtype=complex)
        with pytest.raises(IncompleteWavefunction):
            pt_image(Wavefunction(grid, psi, psi, 0j, 1j, span=(0, 5)))


class TestCurrent:
    """q = psi phi' - phi psi' with dq/dx = 2i Im(E) rho"""

    def test_constant_at_real_energy(self, generic_scarf, fast_grid):
        w = scattering_state(generic_scarf, 1.0, fast_grid(generic_scarf))
        field = correlation_field(w)
        assert current_constancy(field) < 1e-5
        assert continuity_residual(w) < 1e-5 * np.max(np.abs(field.rho))

    def test_continuity_in_the_broken_phase(self, broken_pair, fast_grid):
        grid = fast_grid(broken_pair, n_points=25001)
        w = eigenfunction(broken_pair, _broken_energy(broken_pair), grid)
        rho = correlation_density(w)
        assert abs(w.energy.imag) > 0.3
        assert continuity_residual(w) < 1e-5 * np.max(np.abs(rho))

    def test_continuity_residual_is_second_order(self, broken_pair, fast_grid):
        energy = _broken_energy(broken_pair)
        coarse = continuity_residual(eigenfunction(broken_pair, energy, fast_grid(broken_pair, n_points=12501)))
        fine = continuity_residual(eigenfunction(broken_pair, energy, fast_grid(broken_pair, n_points=25001)))
        assert 3.0 < coarse / fine < 5.0

    def test_bound_state_carries_no_current(self, reflectionless, fast_grid):
        w = eigenfunction(reflectionless, 0.0, fast_grid(reflectionless))
        field = correlation_field(w)
        assert np.max(np.abs(field.q)) < 1e-6 * np.max(np.abs(field.rho))


class TestPtOverlap:

    @pytest.mark.parametrize("energy", [0.0, 4.0, 6.0])
    def test_unbroken_bound_states_are_pt_eigenfunctions(self, reflectionless, fast_grid, energy):
        w = eigenfunction(reflectionless, energy, fast_grid(reflectionless))
        c, defect = pt_overlap(w)
        assert defect < 1e-6
        assert abs(abs(c) - 1) < 1e-6

    def test_broken_state_maps_to_its_partner(self, broken_pair, fast_grid):
        grid = fast_grid(broken_pair)
        energy = _broken_energy(broken_pair)
        state = eigenfunction(broken_pair, energy, grid)
        partner = eigenfunction(broken_pair, energy.conjugate(), grid)
        _, self_defect = pt_overlap(state)
        _, partner_defect = pt_overlap(state, partner)
        assert partner_defect < 1e-5
        assert self_defect > 1e-2

    def test_eigenfunction_matches_ground_state_oracle(self, reflectionless, fast_grid):
        grid = fast_grid(reflectionless)
        w = eigenfunction(reflectionless, 0.0, grid)
        oracle = ground_state_oracle(reflectionless, grid)
        scaled = w.psi / w.psi[grid.center_index]
        assert np.max(np.abs(scaled - oracle.psi)) < 1e-6

    def test_zero_function(self):
        grid = Grid(1.0, 11)
        zeros = np.zeros(11, dtype=complex)
        with pytest.raises(ZeroFunction):
            pt_overlap(Wavefunction(grid, zeros, zeros, 0j, 1j))

    def test_partner_on_other_grid(self, reflectionless):
        w = eigenfunction(reflectionless, 0.0, Grid(25.0, 2001))
        other = eigenfunction(reflectionless, 0.0, Grid(25.0, 2501))
        with pytest.raises(GridMismatch):
            pt_overlap(w, other)


class TestNonlocalInnerProduct:

    def test_bound_states_are_orthogonal(self, reflectionless, fast_grid):
        grid = fast_grid(reflectionless)
        states = [eigenfunction(reflectionless, e, grid) for e in (0.0, 4.0, 6.0)]
        norms = [abs(nonlocal_inner_product(s, s)) for s in states]
        assert min(norms) > 1e-3
        for i in range(3):
            for j in range(i + 1, 3):
                overlap = abs(nonlocal_inner_product(states[i], states[j]))
                assert overlap < 1e-6 * np.sqrt(norms[i] * norms[j])

    def test_reflection_moves_to_either_factor(self, generic_scarf, fast_grid):
        grid = fast_grid(generic_scarf)
        phi = scattering_state(generic_scarf, 1.0, grid)
        psi = scattering_state(generic_scarf, 2.0, grid)
        moved = trapezoid(np.conj(psi.psi) * grid.mirror(phi.psi), grid.x)
        scale = trapezoid(np.abs(phi.psi * psi.psi), grid.x)
        assert abs(nonlocal_inner_product(phi, psi) - moved) < 1e-12 * scale

    def test_grid_mismatch(self, free_states):
        first, second = free_states
        with pytest.raises(GridMismatch):
            nonlocal_inner_product(first, second)

    @pytest.fixture
    def free_states(self, reflectionless):
        return (
            eigenfunction(reflectionless, 0.0, Grid(25.0, 2001)),
            eigenfunction(reflectionless, 0.0, Grid(25.0, 4001)),
        )


def test_correlation_csv(tmp_path, generic_scarf):
    grid = Grid.for_potential(generic_scarf, n_points=2001)
    w = integrate(generic_scarf, 2.0, grid, -grid.half_width, (1.0, 0.0), Direction.FORWARD)
    path = write_correlation_csv(correlation_field(w), tmp_path / "rho.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "x,re_rho,im_rho,re_q,im_q"
    assert len(lines) == 2002
