"""
Stationary Schrodinger equation -psi'' + V psi = E psi at complex E.

The first-order system (psi, psi')' = [[0, 1], [V - E, 0]] (psi, psi') is
linear, so one classical RK4 step is itself a 2x2 matrix built from q = V - E
at the step's two ends and midpoint. Integration is either a sequential
application of these matrices (full wavefunctions) or a tree-reduced product
of all of them (transfer maps for scattering and shooting).
"""

import logging
import math
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ptlab.errors import IntegrationOverflow, ZeroMomentum
from ptlab.models.grid import Grid, Wavefunction
from ptlab.potential import PotentialSpec, momentum, sample
from ptlab.utils.persistence import write_csv

logger = logging.getLogger(__name__)

OVERFLOW_LIMIT = 1e280
OVERFLOW_CHECK_EVERY = 1000
ZERO_MOMENTUM = 1e-12

__all__ = [
    "Direction",
    "Propagator",
    "chain_product",
    "extract_coefficients",
    "fundamental_pair",
    "integrate",
    "momentum",
    "plane_wave_coefficients",
    "step_propagators",
    "wronskian",
    "write_wavefunction_csv",
]


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


def step_propagators(q0, qm, q1, h: float, direction: Direction):
    """
    Exact RK4 one-step matrices (p11, p12, p21, p22) for every interval.

    q0, qm, q1 are V - E at the left node, midpoint and right node of each
    interval. FORWARD maps state(x_j) to state(x_j+1); BACKWARD maps
    state(x_j+1) to state(x_j).
    """
    h2 = h * h
    h3 = h2 * h
    h4 = h2 * h2
    cross = h * (q0 + 4.0 * qm + q1) / 6.0 + h3 * qm * (q0 + q1) / 12.0
    if direction is Direction.FORWARD:
        p11 = 1.0 + h2 * (q0 + 2.0 * qm) / 6.0 + h4 * qm * q0 / 24.0
        p12 = h + h3 * qm / 6.0
        p21 = cross
        p22 = 1.0 + h2 * (2.0 * qm + q1) / 6.0 + h4 * qm * q1 / 24.0
    else:
        p11 = 1.0 + h2 * (q1 + 2.0 * qm) / 6.0 + h4 * qm * q1 / 24.0
        p12 = -h - h3 * qm / 6.0
        p21 = -cross
        p22 = 1.0 + h2 * (2.0 * qm + q0) / 6.0 + h4 * qm * q0 / 24.0
    return p11, p12, p21, p22


def chain_product(p11, p12, p21, p22) -> Tuple[np.ndarray, int]:
    """
    Product P_{N-1} ... P_1 P_0 of matrices given in application order.

    Returns (mantissa, exponent) with product = mantissa * 2**exponent.
    Pairs are multiplied level by level and every partial product is
    rescaled by a power of two, so nothing overflows and no rounding is
    introduced by the scaling.
    """
    mats = np.empty((len(p11), 2, 2), dtype=complex)
    mats[:, 0, 0] = p11
    mats[:, 0, 1] = p12
    mats[:, 1, 0] = p21
    mats[:, 1, 1] = p22
    exps = np.zeros(len(p11), dtype=np.int64)

    while len(mats) > 1:
        if len(mats) % 2:
            mats = np.concatenate([mats, np.eye(2, dtype=complex)[None]])
            exps = np.append(exps, 0)
        mats = mats[1::2] @ mats[0::2]
        exps = exps[1::2] + exps[0::2]
        peak = np.max(np.abs(mats), axis=(1, 2))
        _, shift = np.frexp(peak)
        mats = mats * np.ldexp(1.0, -shift)[:, None, None]
        exps = exps + shift

    return mats[0], int(exps[0])


class Propagator:
    """Potential samples on one grid, reused across energies"""

    def __init__(self, spec: PotentialSpec, grid: Grid):
        self.spec = spec
        self.grid = grid
        self.v_nodes, self.v_mid = sample(spec, grid)

    def step_arrays(self, energy: complex, direction: Direction, first: int = 0, last: Optional[int] = None):
        """Step matrices of intervals first..last-1 (interval i joins x_i and x_i+1)"""
        last = self.grid.n_points - 1 if last is None else last
        q = self.v_nodes[first:last + 1] - energy
        qm = self.v_mid[first:last] - energy
        return step_propagators(q[:-1], qm, q[1:], self.grid.step, direction)

    def propagate(
        self,
        energy: complex,
        start: int,
        init: Tuple[complex, complex],
        direction: Direction,
        stop: Optional[int] = None,
        rescale: bool = False,
    ) -> Tuple[np.ndarray, np.ndarray, Tuple[int, int]]:
        """Sequential integration from index start to stop (inclusive)"""
        n = self.grid.n_points
        forward = direction is Direction.FORWARD
        if stop is None:
            stop = n - 1 if forward else 0
        if (forward and stop < start) or (not forward and stop > start):
            raise ValueError(f"stop index {stop} lies behind start {start} for {direction.value} integration")

        p11, p12, p21, p22 = (a.tolist() for a in self.step_arrays(energy, direction))
        psi = np.full(n, np.nan, dtype=complex)
        dpsi = np.full(n, np.nan, dtype=complex)
        y0, y1 = complex(init[0]), complex(init[1])
        psi[start], dpsi[start] = y0, y1

        step = 1 if forward else -1
        j = start
        count = 0
        while j != stop:
            i = j if forward else j - 1
            y0, y1 = p11[i] * y0 + p12[i] * y1, p21[i] * y0 + p22[i] * y1
            j += step
            psi[j], dpsi[j] = y0, y1
            count += 1
            if count % OVERFLOW_CHECK_EVERY == 0:
                size = max(abs(y0), abs(y1))
                if size > OVERFLOW_LIMIT or not math.isfinite(size):
                    if not rescale:
                        raise IntegrationOverflow(
                            f"|psi| = {size:.3e} at x = {self.grid.x[j]:.6g} (E = {energy}); integrate with rescale=True"
                        )
                    lo, hi = sorted((start, j))
                    psi[lo:hi + 1] /= size
                    dpsi[lo:hi + 1] /= size
                    y0, y1 = y0 / size, y1 / size
                    logger.debug(f"rescaled solution by {size:.3e} at index {j}")

        return psi, dpsi, tuple(sorted((start, stop)))

    def transfer(self, energy: complex) -> Tuple[np.ndarray, int]:
        """Map of (psi, psi') from -L to +L"""
        return chain_product(*self.step_arrays(energy, Direction.FORWARD))

    def half_transfers(self, energy: complex):
        """Maps of (psi, psi') from -L to 0 and from +L to 0"""
        m = self.grid.center_index
        forward = self.step_arrays(energy, Direction.FORWARD, 0, m)
        backward = self.step_arrays(energy, Direction.BACKWARD, m)
        left = chain_product(*forward)
        right = chain_product(*(a[::-1] for a in backward))
        return left, right


def integrate(
    spec: PotentialSpec,
    energy: complex,
    grid: Grid,
    x0: float,
    init: Tuple[complex, complex],
    direction: Direction,
    x_stop: Optional[float] = None,
    rescale: bool = False,
    propagator: Optional[Propagator] = None,
) -> Wavefunction:
    """
    Fourth-order solution from x0 with init = (psi(x0), psi'(x0)).

    Points outside the integrated span are NaN. Raises IntegrationOverflow
    once |psi| passes OVERFLOW_LIMIT unless rescale is set.
    """
    if init[0] == 0 and init[1] == 0:
        raise ValueError("initial data must not be identically zero")
    propagator = propagator or Propagator(spec, grid)
    start = grid.index_of(x0)
    stop = None if x_stop is None else grid.index_of(x_stop)
    psi, dpsi, span = propagator.propagate(energy, start, init, direction, stop, rescale)
    return Wavefunction(grid, psi, dpsi, complex(energy), momentum(spec, energy), span)


def _left_plane_waves(k: complex, x0: float):
    plus = np.exp(1j * k * x0)
    minus = np.exp(-1j * k * x0)
    return (plus, 1j * k * plus), (minus, -1j * k * minus)


def fundamental_pair(spec: PotentialSpec, energy: complex, grid: Grid) -> Tuple[Wavefunction, Wavefunction]:
    """Solutions that are pure e^{ikx} and pure e^{-ikx} at x = -L"""
    k = momentum(spec, energy)
    if abs(k) < ZERO_MOMENTUM:
        raise ZeroMomentum("the plane-wave pair degenerates at k = 0")
    x0 = float(grid.x[0])
    right_mover, left_mover = _left_plane_waves(k, x0)
    propagator = Propagator(spec, grid)
    return (
        integrate(spec, energy, grid, x0, right_mover, Direction.FORWARD, propagator=propagator),
        integrate(spec, energy, grid, x0, left_mover, Direction.FORWARD, propagator=propagator),
    )


def plane_wave_coefficients(psi: complex, dpsi: complex, x: float, k: complex) -> Tuple[complex, complex]:
    """(c+, c-) with psi = c+ e^{ikx} + c- e^{-ikx} at x"""
    if abs(k) < ZERO_MOMENTUM:
        raise ZeroMomentum(f"|k| = {abs(k):.3e} is below {ZERO_MOMENTUM}")
    two_ik = 2j * k
    c_plus = np.exp(-1j * k * x) * (dpsi + 1j * k * psi) / two_ik
    c_minus = np.exp(1j * k * x) * (1j * k * psi - dpsi) / two_ik
    return complex(c_plus), complex(c_minus)


def extract_coefficients(w: Wavefunction, x: float, k: complex) -> Tuple[complex, complex]:
    j = w.grid.index_of(x)
    return plane_wave_coefficients(w.psi[j], w.dpsi[j], float(w.grid.x[j]), k)


def wronskian(w1: Wavefunction, w2: Wavefunction) -> np.ndarray:
    """psi1 psi2' - psi2 psi1' on the common grid"""
    return w1.psi * w2.dpsi - w2.psi * w1.dpsi


def write_wavefunction_csv(w: Wavefunction, path: Union[str, Path]) -> Path:
    columns = [w.x, w.psi.real, w.psi.imag, w.dpsi.real, w.dpsi.imag]
    return write_csv(path, ("x", "re_psi", "im_psi", "re_dpsi", "im_dpsi"), columns)
