"""
Complex 1-D potentials in units hbar = 1, m = 1/2 (-psi'' + V psi = E psi).

Other conventions: multiply energies and V by hbar^2/2m and keep x.

Built-ins are the complexified Scarf-II potential, written either through
its SUSY parameters (a_pot, b_pot, alpha) or through its strengths
(v_asym, depth, coupling), and tabulated custom potentials.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ptlab.errors import (
    ConfigError,
    NotAsymptoticallyFlat,
    NotNormalizable,
    NotPTSymmetric,
    OutOfRange,
    UnsupportedPotential,
)
from ptlab.models.grid import Grid, Wavefunction

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

PT_TOLERANCE = 1e-10
CSV_HEADER = ("x", "re_v", "im_v")


class PotentialKind(Enum):
    SCARF2 = "scarf2"
    SCARF2_STRENGTHS = "scarf2-strengths"
    CUSTOM_TABULATED = "custom"


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """
    A complex potential. a_pot, b_pot play the roles of A, B in
    W(x) = A tanh(alpha x) + i B sech(alpha x).
    """
    kind: PotentialKind
    a_pot: float = 0.0
    b_pot: float = 0.0
    alpha: float = 1.0
    depth: float = 0.0
    coupling: float = 0.0
    v_asym: float = 0.0
    samples: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def __post_init__(self):
        if self.kind is PotentialKind.CUSTOM_TABULATED:
            if self.samples is None:
                raise ValueError("custom potentials need samples")
            xs, vs = self.samples
            if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 3:
                raise ValueError("samples must be two equal-length 1-D arrays")
            if np.any(np.diff(xs) <= 0):
                raise ValueError("tabulated x must be strictly increasing")
            if abs(xs[0] + xs[-1]) > 1e-9 * max(abs(xs[0]), abs(xs[-1])):
                raise ValueError(f"tabulated range must be symmetric, got [{xs[0]}, {xs[-1]}]")
            return
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        params = (self.a_pot, self.b_pot, self.depth, self.coupling, self.v_asym)
        if not all(math.isfinite(p) for p in params):
            raise ValueError("potential parameters must be finite")

    @property
    def is_scarf(self) -> bool:
        return self.kind is not PotentialKind.CUSTOM_TABULATED

    @property
    def table_half_width(self) -> float:
        return float(self.samples[0][-1])

    def describe(self) -> dict:
        """Parameters for reports"""
        if self.kind is PotentialKind.SCARF2:
            return {"kind": self.kind.value, "A": self.a_pot, "B": self.b_pot, "alpha": self.alpha}
        if self.kind is PotentialKind.SCARF2_STRENGTHS:
            return {
                "kind": self.kind.value,
                "depth": self.depth,
                "coupling": self.coupling,
                "v_asym": self.v_asym,
                "alpha": self.alpha,
            }
        xs = self.samples[0]
        return {"kind": self.kind.value, "n_samples": int(xs.size), "half_width": float(xs[-1])}


def scarf2(a_pot: float, b_pot: float, alpha: float = 1.0) -> PotentialSpec:
    return PotentialSpec(PotentialKind.SCARF2, a_pot=float(a_pot), b_pot=float(b_pot), alpha=float(alpha))


def scarf2_strengths(depth: float, coupling: float, alpha: float = 1.0, v_asym: float = 0.0) -> PotentialSpec:
    """V = v_asym - depth sech^2(alpha x) + i coupling sech(alpha x) tanh(alpha x)"""
    return PotentialSpec(
        PotentialKind.SCARF2_STRENGTHS,
        alpha=float(alpha),
        depth=float(depth),
        coupling=float(coupling),
        v_asym=float(v_asym),
    )


def tabulated(xs: np.ndarray, values: np.ndarray) -> PotentialSpec:
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=complex)
    return PotentialSpec(PotentialKind.CUSTOM_TABULATED, samples=(xs, values))


def load_tabulated(path: Union[str, Path]) -> PotentialSpec:
    """Read a `x,re_v,im_v` CSV file"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"custom potential file not found: {path}", field="custom")
    with open(path, "r") as f:
        header = f.readline().strip()
    columns = tuple(c.strip() for c in header.split(","))
    if columns != CSV_HEADER:
        raise ConfigError(f"expected header {','.join(CSV_HEADER)}, got '{header}'", field="custom", line=1)
    try:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise ConfigError(f"unreadable potential table {path}: {e}", field="custom")
    if table.shape[1] != 3:
        raise ConfigError(f"expected 3 columns, got {table.shape[1]}", field="custom")
    try:
        spec = tabulated(table[:, 0], table[:, 1] + 1j * table[:, 2])
    except ValueError as e:
        raise ConfigError(str(e), field="custom")
    logger.info(f"Loaded tabulated potential from {path}: {table.shape[0]} samples")
    return spec


def strengths(spec: PotentialSpec) -> Tuple[float, float, float]:
    """(v_asym, depth, coupling) of a Scarf-II spec"""
    if spec.kind is PotentialKind.SCARF2:
        a, b, alpha = spec.a_pot, spec.b_pot, spec.alpha
        return a * a, a * (a + alpha) + b * b, b * (2.0 * a + alpha)
    if spec.kind is PotentialKind.SCARF2_STRENGTHS:
        return spec.v_asym, spec.depth, spec.coupling
    raise UnsupportedPotential("strengths are only defined for Scarf-II potentials")


def asymptote(spec: PotentialSpec) -> float:
    """Real constant V(+-inf)"""
    if spec.is_scarf:
        return strengths(spec)[0]
    vs = spec.samples[1]
    left, right = vs[0], vs[-1]
    scale = max(1.0, abs(left), abs(right))
    if abs(left - right) > 1e-8 * scale or abs(left.imag) > 1e-8 * scale:
        raise NotAsymptoticallyFlat(f"tabulated ends differ or are complex: V(-L)={left}, V(L)={right}")
    return float(0.5 * (left.real + right.real))


def momentum(spec: PotentialSpec, energy: complex) -> complex:
    """k with k^2 = E - V_asym on the branch Im k >= 0"""
    k = np.sqrt(complex(energy) - asymptote(spec))
    if k.imag < 0:
        k = -k
    return complex(k)


def evaluate(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    """V(x); vectorised over x"""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if spec.is_scarf:
        v_asym, depth, coupling = strengths(spec)
        u = spec.alpha * x
        sech = 1.0 / np.cosh(u)
        values = v_asym - depth * sech * sech + 1j * coupling * np.tanh(u) * sech
    else:
        xs, vs = spec.samples
        tolerance = 1e-9 * (xs[-1] - xs[0])
        if np.any(x < xs[0] - tolerance) or np.any(x > xs[-1] + tolerance):
            raise OutOfRange(f"x outside tabulated range [{xs[0]}, {xs[-1]}]")
        values = np.interp(x, xs, vs.real) + 1j * np.interp(x, xs, vs.imag)
    return complex(values) if scalar else values


def sample(spec: PotentialSpec, grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    """V at the grid nodes and at the step midpoints"""
    return evaluate(spec, grid.x), evaluate(spec, grid.midpoints)


@dataclass
class EvenOddParts:
    """V = v_even + i v_odd"""
    v_even: ArrayLike
    v_odd: ArrayLike
    asymmetry: float = 0.0


def pt_asymmetry(spec: PotentialSpec, xs: Optional[np.ndarray] = None) -> float:
    """max_x |V*(-x) - V(x)|"""
    if xs is None:
        xs = spec.samples[0] if not spec.is_scarf else np.linspace(-30.0, 30.0, 601) / spec.alpha
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(np.conj(evaluate(spec, -xs)) - evaluate(spec, xs))))


def is_pt_symmetric(spec: PotentialSpec, tol: float = PT_TOLERANCE) -> bool:
    if spec.is_scarf:
        return True
    scale = max(1.0, float(np.max(np.abs(spec.samples[1]))))
    return pt_asymmetry(spec) <= tol * scale


def decompose_even_odd(spec: PotentialSpec, x: ArrayLike, tol: float = PT_TOLERANCE) -> EvenOddParts:
    """Even real part and odd imaginary part of a PT-symmetric potential"""
    here = evaluate(spec, x)
    there = evaluate(spec, np.negative(x))
    v_even = 0.5 * (np.real(here) + np.real(there))
    v_odd = 0.5 * (np.imag(here) - np.imag(there))
    asymmetry = float(np.max(np.abs(np.conj(there) - here)))
    if not spec.is_scarf:
        scale = max(1.0, float(np.max(np.abs(spec.samples[1]))))
        if asymmetry > tol * scale:
            raise NotPTSymmetric(f"potential violates V*(-x) = V(x) by {asymmetry:.3e}")
    return EvenOddParts(v_even=v_even, v_odd=v_odd, asymmetry=asymmetry)


def conjugate(spec: PotentialSpec) -> PotentialSpec:
    """Spec of V*(x); defined for every potential"""
    if spec.kind is PotentialKind.SCARF2:
        return replace(spec, b_pot=-spec.b_pot)
    if spec.kind is PotentialKind.SCARF2_STRENGTHS:
        return replace(spec, coupling=-spec.coupling)
    xs, vs = spec.samples
    return tabulated(xs.copy(), np.conj(vs))


def flip_odd(spec: PotentialSpec) -> PotentialSpec:
    """V_even + i V_odd -> V_even - i V_odd"""
    if not spec.is_scarf and not is_pt_symmetric(spec):
        raise NotPTSymmetric("flip_odd needs a PT-symmetric potential; use conjugate()")
    return conjugate(spec)


def _require_scarf2(spec: PotentialSpec, what: str):
    if spec.kind is not PotentialKind.SCARF2:
        raise UnsupportedPotential(f"{what} is only defined for Scarf-II in (A, B, alpha) form")


def superpotential(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    """W(x) = A tanh(alpha x) + i B / cosh(alpha x), with W^2 - W' = V"""
    _require_scarf2(spec, "superpotential")
    u = spec.alpha * np.asarray(x, dtype=float)
    values = spec.a_pot * np.tanh(u) + 1j * spec.b_pot / np.cosh(u)
    return complex(values) if np.ndim(x) == 0 else values


def superpotential_derivative(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    _require_scarf2(spec, "superpotential")
    u = spec.alpha * np.asarray(x, dtype=float)
    sech = 1.0 / np.cosh(u)
    values = spec.alpha * (spec.a_pot * sech * sech - 1j * spec.b_pot * np.tanh(u) * sech)
    return complex(values) if np.ndim(x) == 0 else values


def gudermannian_phase(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    """Closed form of int_0^x W"""
    _require_scarf2(spec, "superpotential")
    u = spec.alpha * np.asarray(x, dtype=float)
    log_cosh = np.abs(u) + np.log1p(np.exp(-2.0 * np.abs(u))) - math.log(2.0)
    values = (spec.a_pot * log_cosh + 2j * spec.b_pot * np.arctan(np.tanh(0.5 * u))) / spec.alpha
    return complex(values) if np.ndim(x) == 0 else values


def ground_state_oracle(spec: PotentialSpec, grid: Grid) -> Wavefunction:
    """
    SUSY ground state psi_0 = exp(-int_0^x W) at E = 0, psi_0(0) = 1.

    The integral is accumulated outward from x = 0 with Simpson's rule on
    every grid interval (midpoint samples), so the result is fourth order.
    """
    _require_scarf2(spec, "ground_state_oracle")
    if spec.a_pot <= 0:
        raise NotNormalizable(f"exp(-int W) is not normalizable for A={spec.a_pot} <= 0")

    h = grid.step
    w_nodes = superpotential(spec, grid.x)
    w_mid = superpotential(spec, grid.midpoints)
    increments = h / 6.0 * (w_nodes[:-1] + 4.0 * w_mid + w_nodes[1:])

    m = grid.center_index
    integral = np.zeros(grid.n_points, dtype=complex)
    integral[m + 1:] = np.cumsum(increments[m:])
    integral[:m] = -np.cumsum(increments[:m][::-1])[::-1]

    psi = np.exp(-integral)
    return Wavefunction(grid, psi, -w_nodes * psi, 0j, momentum(spec, 0.0))


def ground_state_residual(spec: PotentialSpec, w: Wavefunction) -> np.ndarray:
    """(-psi'' + V psi)/psi with a five-point second difference, two points trimmed at each end"""
    psi = w.require_complete().psi
    h = w.grid.step
    d2 = (-psi[4:] + 16.0 * psi[3:-1] - 30.0 * psi[2:-2] + 16.0 * psi[1:-3] - psi[:-4]) / (12.0 * h * h)
    v = evaluate(spec, w.grid.x[2:-2])
    return (-d2 + v * psi[2:-2]) / psi[2:-2]
