"""
Transfer and scattering matrices of a complex potential at real k.

Conventions: psi = A e^{ikx} + B e^{-ikx} as x -> -inf and
C e^{ikx} + D e^{-ikx} as x -> +inf. M maps (A, B) to (C, D); S maps the
incoming amplitudes (A, D) to the outgoing ones (B, C), so S[0, 0] is the
left reflection amplitude and S[1, 0] the transmission amplitude.
"""

import cmath
import logging
import math
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ptlab import specfun
from ptlab.errors import DegenerateDenominator, SpectralSingularity
from ptlab.models.grid import Grid, Wavefunction
from ptlab.models.report import (
    AsymptoticCoefficients,
    IdentityReport,
    Incidence,
    ScatteringMatrix,
    TransferMatrix,
)
from ptlab.potential import PotentialKind, PotentialSpec, asymptote, conjugate
from ptlab.schrodinger import Direction, Propagator, integrate, plane_wave_coefficients

logger = logging.getLogger(__name__)

SINGULARITY_TOLERANCE = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
J = np.array([[0, -1], [1, 0]], dtype=complex)

DEFAULT_METRICS = {"J": J, "sigma1": SIGMA1}


class ReflectionVariant(Enum):
    """Second bracket term of the analytic reflection amplitude: sinh or sin of pi A/alpha"""
    AS_PRINTED = "as-printed"
    SIN_CORRECTED = "sin-corrected"


class FluxFormula(Enum):
    """Cross term of the flux deviation with (CONSISTENT) or without (AS_PRINTED) the factor 1/4"""
    AS_PRINTED = "as-printed"
    CONSISTENT = "consistent"


def max_norm(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix)))


def _require_positive_k(k: float):
    if not (np.isreal(k) and float(np.real(k)) > 0):
        raise ValueError(f"scattering needs real k > 0, got {k}")


def transfer_matrix(
    spec: PotentialSpec,
    k: float,
    grid: Grid,
    propagator: Optional[Propagator] = None,
) -> TransferMatrix:
    """Propagate the two plane waves launched at -L to +L and read off (C, D)"""
    _require_positive_k(k)
    k = float(np.real(k))
    propagator = propagator or Propagator(spec, grid)
    energy = asymptote(spec) + k * k

    mantissa, exponent = propagator.transfer(energy)
    product = mantissa * 2.0 ** exponent

    x_left, x_right = float(grid.x[0]), float(grid.x[-1])
    m = np.empty((2, 2), dtype=complex)
    for column, sign in enumerate((1.0, -1.0)):
        wave = cmath.exp(sign * 1j * k * x_left)
        state = product @ np.array([wave, sign * 1j * k * wave])
        m[:, column] = plane_wave_coefficients(state[0], state[1], x_right, k)

    logger.debug(f"M(k={k}) computed, |det M - 1| = {abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] - 1):.2e}")
    return TransferMatrix(m, k)


def s_from_m(transfer: TransferMatrix) -> ScatteringMatrix:
    m = transfer.m
    m22 = m[1, 1]
    if abs(m22) < SINGULARITY_TOLERANCE:
        raise SpectralSingularity(transfer.k, abs(m22))
    s = np.array([
        [-m[1, 0] / m22, 1.0 / m22],
        [transfer.det / m22, m[0, 1] / m22],
    ])
    return ScatteringMatrix(s, transfer.k)


def amplitudes(scattering: ScatteringMatrix) -> Tuple[complex, complex, complex]:
    """(t, r_left, r_right)"""
    return scattering.t_left, scattering.r_left, scattering.r_right


def coefficients(transfer: TransferMatrix, incidence: Incidence) -> AsymptoticCoefficients:
    """Physical scattering solution for a unit wave incident from one side"""
    m = transfer.m
    m22 = m[1, 1]
    if abs(m22) < SINGULARITY_TOLERANCE:
        raise SpectralSingularity(transfer.k, abs(m22))
    if incidence is Incidence.LEFT:
        return AsymptoticCoefficients(1.0 + 0j, complex(-m[1, 0] / m22), complex(transfer.det / m22), 0j)
    return AsymptoticCoefficients(0j, complex(1.0 / m22), complex(m[0, 1] / m22), 1.0 + 0j)


def indicators(transfer: TransferMatrix) -> Dict[str, float]:
    """|M11| vanishes at coherent perfect absorption, |M22| at a spectral singularity"""
    return {"cpa_m11": float(abs(transfer.m[0, 0])), "singularity_m22": float(abs(transfer.m[1, 1]))}


def scattering_state(spec: PotentialSpec, k: float, grid: Grid, propagator: Optional[Propagator] = None) -> Wavefunction:
    """Left-incidence solution (A, B, C, D) = (1, r_L, t, 0), integrated back from +L"""
    propagator = propagator or Propagator(spec, grid)
    transfer = transfer_matrix(spec, k, grid, propagator)
    t = coefficients(transfer, Incidence.LEFT).cf_c
    x_right = float(grid.x[-1])
    wave = t * cmath.exp(1j * k * x_right)
    energy = asymptote(spec) + k * k
    return integrate(spec, energy, grid, x_right, (wave, 1j * k * wave), Direction.BACKWARD, propagator=propagator)


def flux_deviation_measured(scattering: ScatteringMatrix) -> float:
    """|r_L|^2 + |t|^2 - 1"""
    return abs(scattering.r_left) ** 2 + abs(scattering.t_left) ** 2 - 1.0


def scarf2_analytic_amplitudes(
    a_pot: float,
    b_pot: float,
    alpha: float,
    k: float,
    variant: ReflectionVariant = ReflectionVariant.SIN_CORRECTED,
) -> Tuple[complex, complex]:
    """
    Closed-form (T, R) of the complexified Scarf-II potential.

    T = G(-a-ik) G(1+a-ik) G(1/2-b-ik) G(1/2+b-ik) / [G(-ik) G(1-ik) G(1/2-ik)^2]
    with a, b, k in units of alpha. R is the left reflection amplitude.
    """
    _require_positive_k(k)
    a, b, p = a_pot / alpha, b_pot / alpha, float(k) / alpha
    ik = 1j * p
    t, _ = specfun.gamma_ratio(
        [-a - ik, 1.0 + a - ik, 0.5 - b - ik, 0.5 + b - ik],
        [-ik, 1.0 - ik, 0.5 - ik, 0.5 - ik],
    )
    second = math.sin(math.pi * a) if variant is ReflectionVariant.SIN_CORRECTED else math.sinh(math.pi * a)
    bracket = (
        math.cos(math.pi * a) * math.sin(math.pi * b) / math.cosh(math.pi * p)
        + second * math.cos(math.pi * b) / math.sinh(math.pi * p)
    )
    return t, 1j * t * bracket


def flux_deviation_analytic(
    a_pot: float,
    b_pot: float,
    alpha: float,
    k: float,
    formula: FluxFormula = FluxFormula.CONSISTENT,
) -> float:
    """|R|^2 + |T|^2 - 1 in closed form"""
    _require_positive_k(k)
    x = math.pi * float(k) / alpha
    sin_a2 = math.sin(math.pi * a_pot / alpha) ** 2
    cos_a2 = math.cos(math.pi * a_pot / alpha) ** 2
    sin_b2 = math.sin(math.pi * b_pot / alpha) ** 2
    cos_b2 = math.cos(math.pi * b_pot / alpha) ** 2
    cross = math.sin(2.0 * math.pi * a_pot / alpha) * math.sin(2.0 * math.pi * b_pot / alpha)
    cross_weight = 0.25 if formula is FluxFormula.CONSISTENT else 1.0

    if x < 1.0:
        s2 = math.sinh(x) ** 2
        denominator = (sin_a2 + s2) * (cos_b2 + s2)
        if denominator < 1e-300:
            raise DegenerateDenominator(f"flux denominator underflows at a={a_pot}, b={b_pot}, k={k}")
        numerator = 2.0 * cos_a2 * sin_b2 * s2 + cross_weight * cross * math.sinh(2.0 * x)
        return numerator / denominator

    # divide through by sinh^4 so large k cannot overflow
    inv_s = 1.0 / math.sinh(x) if x < 700.0 else 0.0
    coth = 1.0 / math.tanh(x)
    inv_s2 = inv_s * inv_s
    numerator = 2.0 * cos_a2 * sin_b2 * inv_s2 + cross_weight * cross * 2.0 * coth * inv_s2
    denominator = (sin_a2 * inv_s2 + 1.0) * (cos_b2 * inv_s2 + 1.0)
    return numerator / denominator


def identity_defects(
    spec: PotentialSpec,
    k: float,
    grid: Grid,
    metrics: Optional[Mapping[str, np.ndarray]] = None,
    transfer: Optional[TransferMatrix] = None,
) -> IdentityReport:
    """
    Measure every claimed matrix identity at one k; nothing is thresholded.

    eq13_<name> is ||S^+ eta S - eta|| for each metric eta (J and sigma1 by
    default); eq9 uses the left-incidence solution (1, r_L, t, 0).
    """
    metrics = DEFAULT_METRICS if metrics is None else metrics
    transfer = transfer or transfer_matrix(spec, k, grid)
    scattering = s_from_m(transfer)
    m, s = transfer.m, scattering.s
    m_dag, s_dag = m.conj().T, s.conj().T

    a, b, c, d = coefficients(transfer, Incidence.LEFT).as_tuple()
    eq9 = abs((a * b.conjugate() - b * a.conjugate()) - (c * d.conjugate() - d * c.conjugate()))

    defects = {
        "unitarity": max_norm(s_dag @ s - IDENTITY),
        "hermiticity": max_norm(s - s_dag),
        "eq8": max_norm(m_dag @ SIGMA3 @ m - SIGMA3),
        "eq9": float(eq9),
        "eq10": max_norm(m_dag @ J @ m - J),
        "ptM": max_norm(m.conj() @ m - IDENTITY),
        "symmetry": max_norm(s - s.T),
        "det": float(abs(transfer.det - 1.0)),
    }
    for name, eta in metrics.items():
        eta = np.asarray(eta, dtype=complex)
        defects[f"eq13_{name}"] = max_norm(s_dag @ eta @ s - eta)

    params = dict(spec.describe(), k=float(k))
    return IdentityReport(params=params, defects=defects)


def duality_defect(spec: PotentialSpec, k: float, grid: Grid, transfer: Optional[TransferMatrix] = None) -> float:
    """||S(V)^+ S(V*) - I||; V* is the odd-part flip for PT potentials and holds for any complex V"""
    transfer = transfer or transfer_matrix(spec, k, grid)
    s = s_from_m(transfer).s
    s_partner = s_from_m(transfer_matrix(conjugate(spec), k, grid)).s
    return max_norm(s.conj().T @ s_partner - IDENTITY)


def scatter_report(
    spec: PotentialSpec,
    k: float,
    grid: Grid,
    metrics: Optional[Mapping[str, np.ndarray]] = None,
    variant: ReflectionVariant = ReflectionVariant.SIN_CORRECTED,
) -> Dict:
    """Everything measured and predicted at one k, ready for JSON"""
    transfer = transfer_matrix(spec, k, grid)
    scattering = s_from_m(transfer)
    report = identity_defects(spec, k, grid, metrics, transfer)
    defects = dict(report.defects)
    defects["duality"] = duality_defect(spec, k, grid, transfer)

    t, r_left, r_right = amplitudes(scattering)
    result = {
        "params": dict(spec.describe(), grid=grid.to_dict()),
        "k": float(k),
        "M": transfer.m,
        "S": scattering.s,
        "defects": defects,
        "indicators": indicators(transfer),
        "measured": {
            "T": t,
            "R": r_left,
            "R_right": r_right,
            "flux_deviation": flux_deviation_measured(scattering),
        },
    }
    if spec.kind is PotentialKind.SCARF2:
        t_an, r_an = scarf2_analytic_amplitudes(spec.a_pot, spec.b_pot, spec.alpha, k, variant)
        result["analytic"] = {
            "T": t_an,
            "R": r_an,
            "variant": variant.value,
            "flux_deviation": flux_deviation_analytic(spec.a_pot, spec.b_pot, spec.alpha, k),
            "flux_deviation_as_printed": flux_deviation_analytic(
                spec.a_pot, spec.b_pot, spec.alpha, k, FluxFormula.AS_PRINTED
            ),
        }
    return result
