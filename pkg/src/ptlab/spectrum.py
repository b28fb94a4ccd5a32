"""
Bound states and broken-phase eigenvalue pairs by complex-energy shooting.

A solution decaying to the left and one decaying to the right are carried
to x = 0 and their Wronskian is driven to zero by Newton's method from a
fixed lattice of seeds. kappa = sqrt(V_asym - E) on the principal branch;
Re kappa > 0 is required everywhere.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ptlab.correlation import pt_overlap
from ptlab.errors import BranchError, EmptySpectrum, NoConvergence, UnsupportedPotential
from ptlab.models.grid import Grid, Wavefunction
from ptlab.models.report import (
    Classification,
    Phase,
    SeedFailure,
    SpectralPoint,
    SpectrumResult,
)
from ptlab.potential import PotentialKind, PotentialSpec, asymptote, momentum, strengths
from ptlab.schrodinger import Direction, Propagator, integrate

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MISMATCH_TOL = 1e-8
IMAG_TOL = 1e-8
PAIR_TOL = 1e-6
MAX_ITERATIONS = 50


@dataclass(frozen=True)
class SearchBox:
    """Rectangle re_min <= Re E <= re_max, im_min <= Im E <= im_max"""
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min <= self.im_max):
            raise ValueError(f"empty search box {self}")

    def contains(self, energy: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min - margin <= energy.real <= self.re_max + margin
            and self.im_min - margin <= energy.imag <= self.im_max + margin
        )

    @property
    def size(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    def seeds(self, per_axis: int) -> List[complex]:
        re = np.linspace(self.re_min, self.re_max, per_axis)
        im = np.linspace(self.im_min, self.im_max, per_axis) if self.im_max > self.im_min else [self.im_min]
        return [complex(r, i) for r in re for i in im]

    @classmethod
    def for_potential(cls, spec: PotentialSpec, im_extent: float = 1.0) -> 'SearchBox':
        """
        From below the well bottom to a little above V_asym; complex pairs
        may sit at Re E > V_asym, real seeds on the cut are skipped.
        """
        v_asym = asymptote(spec)
        if spec.is_scarf:
            _, depth, _ = strengths(spec)
            floor = v_asym - abs(depth) - 0.25 * spec.alpha ** 2 - 1.0
            ceiling = v_asym + 0.25 * spec.alpha ** 2
        else:
            floor = float(np.min(spec.samples[1].real)) - 1.0
            ceiling = v_asym + 0.25
        return cls(floor, ceiling, -im_extent, im_extent)

    def to_dict(self):
        return {"re_min": self.re_min, "re_max": self.re_max, "im_min": self.im_min, "im_max": self.im_max}


@dataclass
class PoleCandidate:
    """Energy at which an analytic transmission amplitude has a pole"""
    energy: complex
    kappa: complex
    family: int
    index: int

    def to_dict(self):
        return {"E": self.energy, "kappa": self.kappa, "n": self.index}


@dataclass
class _Shot:
    wronskian: complex
    log_scale: complex
    normalized: complex


def decay_rate(spec: PotentialSpec, energy: complex) -> complex:
    """kappa = sqrt(V_asym - E), principal branch; BranchError unless Re kappa > 0"""
    kappa = cmath.sqrt(asymptote(spec) - complex(energy))
    if kappa.real <= 0:
        raise BranchError(f"Re kappa = {kappa.real:.3e} <= 0 at E = {energy}: no decaying solution")
    return kappa


def _shoot(propagator: Propagator, energy: complex) -> _Shot:
    kappa = decay_rate(propagator.spec, energy)
    grid = propagator.grid
    (left, left_exp), (right, right_exp) = propagator.half_transfers(energy)
    # e^{kappa x} at -L and e^{-kappa x} at +L, both with the factor e^{-kappa L} split off
    u_left = left @ np.array([1.0, kappa])
    u_right = right @ np.array([1.0, -kappa])
    cross_a = u_left[0] * u_right[1]
    cross_b = u_right[0] * u_left[1]
    w = complex(cross_a - cross_b)
    scale = abs(cross_a) + abs(cross_b)
    log_scale = (left_exp + right_exp) * math.log(2.0) - 2.0 * kappa * grid.half_width
    return _Shot(w, log_scale, w / scale if scale > 0 else 0j)


def shoot_mismatch(spec: PotentialSpec, energy: complex, grid: Grid, propagator: Optional[Propagator] = None) -> complex:
    """Wronskian of the two decaying solutions at x = 0, normalised by |psi_L psi_R'| + |psi_R psi_L'|"""
    propagator = propagator or Propagator(spec, grid)
    return _shoot(propagator, energy).normalized


def _newton(
    propagator: Propagator,
    seed: complex,
    box: SearchBox,
    tol: float,
    mismatch_tol: float,
) -> Tuple[complex, float]:
    """Root and its normalised mismatch; NoConvergence when the seed leads nowhere"""
    energy = complex(seed)
    max_step = 0.5 * box.size
    last_step = math.inf
    try:
        for iteration in range(MAX_ITERATIONS):
            shot = _shoot(propagator, energy)
            if shot.wronskian == 0 or (abs(shot.normalized) < mismatch_tol and last_step < tol):
                logger.debug(f"seed {seed}: converged to {energy} after {iteration} iterations")
                return energy, abs(shot.normalized)

            delta = 1e-6 * max(1.0, abs(energy))
            plus = _shoot(propagator, energy + delta)
            minus = _shoot(propagator, energy - delta)
            ratio_plus = plus.wronskian / shot.wronskian * cmath.exp(plus.log_scale - shot.log_scale)
            ratio_minus = minus.wronskian / shot.wronskian * cmath.exp(minus.log_scale - shot.log_scale)
            log_derivative = (ratio_plus - ratio_minus) / (2.0 * delta)
            if log_derivative == 0 or not cmath.isfinite(log_derivative):
                raise NoConvergence("flat or non-finite mismatch derivative", energy)

            step = -1.0 / log_derivative
            if abs(step) > max_step:
                step *= max_step / abs(step)
            for _ in range(20):
                if cmath.sqrt(asymptote(propagator.spec) - (energy + step)).real > 0:
                    break
                step *= 0.5
            else:
                raise NoConvergence("Newton step keeps crossing the continuum cut", energy)

            energy += step
            last_step = abs(step)
            if not box.contains(energy, margin=box.size):
                raise NoConvergence("iteration left the search region", energy)
    except (BranchError, OverflowError, ZeroDivisionError) as e:
        raise NoConvergence(f"{type(e).__name__}: {e}", energy) from e

    raise NoConvergence(f"no convergence after {MAX_ITERATIONS} iterations", energy)


def eigenfunction(spec: PotentialSpec, energy: complex, grid: Grid, propagator: Optional[Propagator] = None) -> Wavefunction:
    """Left- and right-decaying solutions joined at x = 0, scaled to max |psi| = 1"""
    propagator = propagator or Propagator(spec, grid)
    kappa = decay_rate(spec, energy)
    x_left, x_right = float(grid.x[0]), float(grid.x[-1])
    left = integrate(spec, energy, grid, x_left, (1.0, kappa), Direction.FORWARD, x_stop=0.0,
                     rescale=True, propagator=propagator)
    right = integrate(spec, energy, grid, x_right, (1.0, -kappa), Direction.BACKWARD, x_stop=0.0,
                      rescale=True, propagator=propagator)

    m = grid.center_index
    # least-squares c with (psi_L, psi_L') ~ c (psi_R, psi_R') at x = 0
    denominator = abs(right.psi[m]) ** 2 + abs(right.dpsi[m]) ** 2
    c = (left.psi[m] * np.conj(right.psi[m]) + left.dpsi[m] * np.conj(right.dpsi[m])) / denominator

    psi = np.concatenate([left.psi[:m + 1], c * right.psi[m + 1:]])
    dpsi = np.concatenate([left.dpsi[:m + 1], c * right.dpsi[m + 1:]])
    return Wavefunction(grid, psi, dpsi, complex(energy), momentum(spec, energy)).normalized()


def _pole_energy(v_asym: float, kappa: complex) -> complex:
    return complex(v_asym - kappa * kappa)


def scarf2_pole_spectrum(a_pot: float, b_pot: float, alpha: float) -> Dict[str, List[PoleCandidate]]:
    """
    Poles of the analytic transmission amplitude with decaying asymptotics.

    family1: kappa = A - n alpha > 0. family2: kappa = |B| - (m + 1/2) alpha > 0,
    emitted for comparison only.
    """
    v_asym = a_pot * a_pot
    family1 = []
    n = 0
    while a_pot - n * alpha > 0:
        kappa = complex(a_pot - n * alpha)
        family1.append(PoleCandidate(_pole_energy(v_asym, kappa), kappa, 1, n))
        n += 1
    family2 = []
    m = 0
    while abs(b_pot) - (m + 0.5) * alpha > 0:
        kappa = complex(abs(b_pot) - (m + 0.5) * alpha)
        family2.append(PoleCandidate(_pole_energy(v_asym, kappa), kappa, 2, m))
        m += 1
    return {"family1": family1, "family2": family2}


def strength_pole_spectrum(v_asym: float, depth: float, coupling: float, alpha: float) -> Dict[str, List[PoleCandidate]]:
    """
    Pole families of V = v_asym - depth sech^2 + i coupling sech tanh.

    With u = sqrt(depth + alpha^2/4 + coupling), w = sqrt(depth + alpha^2/4 - coupling)
    and s, t = (u +- w)/2: kappa = s - alpha/2 - n alpha and t - alpha/2 - m alpha,
    kept while Re kappa > 0. Complex s, t give complex-conjugate energies.
    """
    base = depth + 0.25 * alpha * alpha
    u = cmath.sqrt(base + coupling)
    w = cmath.sqrt(base - coupling)
    roots = [0.5 * (u + w), 0.5 * (u - w)]
    roots = [-r if r.real < 0 else r for r in roots]

    families = {}
    for family, root in enumerate(roots, start=1):
        candidates = []
        n = 0
        while (root - 0.5 * alpha - n * alpha).real > 0:
            kappa = root - 0.5 * alpha - n * alpha
            candidates.append(PoleCandidate(_pole_energy(v_asym, kappa), kappa, family, n))
            n += 1
        families[f"family{family}"] = candidates
    return families


def pole_candidates(spec: PotentialSpec) -> Dict[str, List[PoleCandidate]]:
    if spec.kind is PotentialKind.SCARF2:
        return scarf2_pole_spectrum(spec.a_pot, spec.b_pot, spec.alpha)
    if spec.kind is PotentialKind.SCARF2_STRENGTHS:
        return strength_pole_spectrum(*strengths(spec), spec.alpha)
    raise UnsupportedPotential("pole candidates exist only for Scarf-II potentials")


def find_eigenvalues(
    spec: PotentialSpec,
    search_box: SearchBox,
    seeds_per_axis: int,
    tol: float = DEFAULT_TOL,
    grid: Optional[Grid] = None,
    mismatch_tol: float = MISMATCH_TOL,
    imag_tol: float = IMAG_TOL,
    pair_tol: float = PAIR_TOL,
) -> SpectrumResult:
    """
    Newton shooting from a seeds_per_axis x seeds_per_axis lattice over the box.

    Roots closer than 10 tol are merged. Every accepted point carries its
    pt_overlap defect; broken-phase points are matched to their conjugate
    partner within pair_tol. |Im E| < imag_tol (relative above |E| = 1)
    counts as bound. Seeds ending in NoConvergence are returned alongside
    as SeedFailure entries, never dropped.
    """
    if seeds_per_axis < 1:
        raise ValueError("seeds_per_axis must be >= 1")
    grid = grid or Grid.for_potential(spec)
    propagator = Propagator(spec, grid)

    roots: List[Tuple[complex, float]] = []
    failures: List[SeedFailure] = []
    v_asym = asymptote(spec)
    for seed in search_box.seeds(seeds_per_axis):
        if seed.imag == 0 and seed.real >= v_asym:
            logger.debug(f"seed {seed} lies on the continuum cut, skipped")
            continue
        try:
            energy, mismatch = _newton(propagator, seed, search_box, tol, mismatch_tol)
        except NoConvergence as e:
            failures.append(SeedFailure(seed, e.reason, e.last_energy))
            continue
        if not search_box.contains(energy):
            logger.debug(f"seed {seed}: root {energy} lies outside the box, ignored")
            continue
        if any(abs(energy - known) < 10.0 * tol * max(1.0, abs(known)) for known, _ in roots):
            continue
        roots.append((energy, mismatch))

    roots.sort(key=lambda r: (round(r[0].real, 12), round(r[0].imag, 12)))
    logger.info(f"{len(roots)} eigenvalues found, {len(failures)} seeds failed")

    indices = {}
    if spec.is_scarf:
        for candidate in pole_candidates(spec)["family1"]:
            indices[candidate.index] = candidate.energy

    points, states = [], []
    for energy, mismatch in roots:
        state = eigenfunction(spec, energy, grid, propagator)
        _, defect = pt_overlap(state)
        classification = Classification.BOUND if abs(energy.imag) < imag_tol * max(1.0, abs(energy)) \
            else Classification.RESONANCE_PAIR_MEMBER
        n_index = next((n for n, e in indices.items() if abs(e - energy) < pair_tol), None)
        points.append(SpectralPoint(energy, decay_rate(spec, energy), classification, mismatch, defect, n_index))
        states.append(state)

    for point, state in zip(points, states):
        if point.classification is not Classification.RESONANCE_PAIR_MEMBER:
            continue
        partners = [j for j, other in enumerate(points) if abs(other.energy - point.energy.conjugate()) < pair_tol]
        if not partners:
            logger.warning(f"no conjugate partner found for E = {point.energy}")
            continue
        _, point.partner_defect = pt_overlap(state, states[partners[0]])

    return SpectrumResult(points, failures)


def phase_classify(spec: PotentialSpec, points: List[SpectralPoint], tol: float = IMAG_TOL) -> Phase:
    """Unbroken iff every eigenvalue is real to tol"""
    if len(points) == 0:
        raise EmptySpectrum(f"no eigenvalues to classify for {spec.describe()}")
    largest = max(abs(p.energy.imag) for p in points)
    return Phase.UNBROKEN if largest < tol else Phase.BROKEN


def spectrum_report(
    spec: PotentialSpec,
    grid: Grid,
    search_box: SearchBox,
    seeds_per_axis: int,
    tol: float = DEFAULT_TOL,
    mismatch_tol: float = MISMATCH_TOL,
    imag_tol: float = IMAG_TOL,
    pair_tol: float = PAIR_TOL,
) -> Dict:
    result = find_eigenvalues(spec, search_box, seeds_per_axis, tol, grid, mismatch_tol, imag_tol, pair_tol)
    phase = phase_classify(spec, result.points, imag_tol) if result.points else None
    report = {
        "spec": spec.describe(),
        "grid": grid.to_dict(),
        "box": search_box.to_dict(),
        "phase": phase.value if phase else None,
        "points": [p.to_dict() for p in result.points],
        "failures": [f.to_dict() for f in result.failures],
    }
    if spec.is_scarf:
        report["pole_candidates"] = {
            name: [c.to_dict() for c in family] for name, family in pole_candidates(spec).items()
        }
    return report
