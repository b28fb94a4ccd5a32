"""
Non-local correlation rho(x) = psi*(-x) psi(x) and its current.

With phi(x) = psi*(-x) the current is q = psi phi' - phi psi' (prefactor
hbar/2im set to one). For a PT-symmetric potential it obeys
dq/dx = 2i Im(E) rho, so q is constant at real energy.
"""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ptlab.errors import AsymmetricGrid, GridMismatch, ZeroFunction
from ptlab.models.grid import Grid, Wavefunction
from ptlab.models.report import CorrelationField
from ptlab.utils.persistence import write_csv

logger = logging.getLogger(__name__)


def _check_symmetric(grid: Grid):
    if not np.array_equal(grid.x[::-1], -grid.x):
        raise AsymmetricGrid(f"grid with L={grid.half_width}, n={grid.n_points} is not mirror symmetric")


def pt_image(w: Wavefunction) -> Tuple[np.ndarray, np.ndarray]:
    """phi(x) = psi*(-x) and phi'(x) = -psi'*(-x) by index reflection"""
    _check_symmetric(w.grid)
    w.require_complete()
    return np.conj(w.grid.mirror(w.psi)), -np.conj(w.grid.mirror(w.dpsi))


def correlation_density(w: Wavefunction) -> np.ndarray:
    phi, _ = pt_image(w)
    return phi * w.psi


def pt_current(w: Wavefunction) -> np.ndarray:
    phi, dphi = pt_image(w)
    return w.psi * dphi - phi * w.dpsi


def correlation_field(w: Wavefunction) -> CorrelationField:
    return CorrelationField(rho=correlation_density(w), q=pt_current(w), grid=w.grid, energy=w.energy)


def continuity_residual(w: Wavefunction) -> float:
    """max |dq/dx - 2i Im(E) rho| with central differences, end points excluded"""
    q = pt_current(w)
    rho = correlation_density(w)
    dq = (q[2:] - q[:-2]) / (2.0 * w.grid.step)
    source = 2j * complex(w.energy).imag * rho[1:-1]
    return float(np.max(np.abs(dq - source)))


def current_constancy(field: CorrelationField) -> float:
    """max |q - q(0)| relative to |q(0)|, absolute when q(0) vanishes"""
    q0 = field.q[field.grid.center_index]
    spread = float(np.max(np.abs(field.q - q0)))
    scale = abs(q0)
    return spread / scale if scale > 1e-300 else spread


def pt_overlap(w: Wavefunction, partner: Optional[Wavefunction] = None) -> Tuple[complex, float]:
    """
    Best c with phi ~ c chi, phi the PT image of w and chi = partner (w itself
    by default), and the relative residual ||phi - c chi|| / ||chi||.
    """
    phi, _ = pt_image(w)
    chi = w.psi if partner is None else partner.require_complete().psi
    if partner is not None and partner.grid != w.grid:
        raise GridMismatch("pt_overlap needs both wavefunctions on one grid")
    norm2 = float(np.vdot(chi, chi).real)
    if norm2 == 0.0 or float(np.vdot(phi, phi).real) == 0.0:
        raise ZeroFunction("pt_overlap of an identically zero wavefunction")
    c = complex(np.vdot(chi, phi) / norm2)
    defect = float(np.linalg.norm(phi - c * chi) / np.sqrt(norm2))
    return c, defect


def nonlocal_inner_product(phi: Wavefunction, psi: Wavefunction) -> complex:
    """Trapezoidal int phi(x) psi*(-x) dx"""
    if phi.grid != psi.grid:
        raise GridMismatch(
            f"grids differ: (L={phi.grid.half_width}, n={phi.grid.n_points}) vs "
            f"(L={psi.grid.half_width}, n={psi.grid.n_points})"
        )
    _check_symmetric(psi.grid)
    integrand = phi.require_complete().psi * np.conj(psi.grid.mirror(psi.require_complete().psi))
    return complex(trapezoid(integrand, psi.grid.x))


def write_correlation_csv(field: CorrelationField, path: Union[str, Path]) -> Path:
    columns = [field.x, field.rho.real, field.rho.imag, field.q.real, field.q.imag]
    return write_csv(path, ("x", "re_rho", "im_rho", "re_q", "im_q"), columns)
