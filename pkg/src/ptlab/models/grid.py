import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from ptlab.errors import IncompleteWavefunction, NotAsymptoticallyFlat, OutOfRange

logger = logging.getLogger(__name__)

DEFAULT_WIDTH = 25.0
DEFAULT_POINTS = 50001
EPS_ASYM = 1e-10

@dataclass(frozen=True)
class Grid:
	"""Symmetric uniform grid x_j = h (j - m), m = (n - 1)/2"""
	half_width: float
	n_points: int

	def __post_init__(self):
		if self.n_points < 3 or self.n_points % 2 == 0:
			raise ValueError(f"n_points must be odd and >= 3, got {self.n_points}")
		if not self.half_width > 0:
			raise ValueError(f"half_width must be positive, got {self.half_width}")

	@property
	def step(self) -> float:
		"""Grid spacing h = 2L/(n - 1)"""
		return 2.0 * self.half_width / (self.n_points - 1)

	@property
	def center_index(self) -> int:
		"""Index of x = 0"""
		return (self.n_points - 1) // 2

	@cached_property
	def x(self) -> np.ndarray:
		# integer offsets keep x[n-1-j] == -x[j] bit for bit
		offsets = np.arange(self.n_points, dtype=float) - self.center_index
		return self.step * offsets

	@cached_property
	def midpoints(self) -> np.ndarray:
		offsets = np.arange(self.n_points - 1, dtype=float) - self.center_index + 0.5
		return self.step * offsets

	@classmethod
	def for_potential(
		cls,
		spec,
		half_width: Optional[float] = None,
		n_points: Optional[int] = None,
		step: Optional[float] = None,
		eps_asym: float = EPS_ASYM,
	) -> 'Grid':
		"""
		Default grid for a potential: L = 25/alpha (table half-width for
		tabulated potentials) and h = 1e-3/alpha. Both ends must be flat.
		"""
		from ptlab.potential import asymptote, evaluate

		if half_width is None:
			half_width = DEFAULT_WIDTH / spec.alpha if spec.is_scarf else spec.table_half_width
		if n_points is None:
			if step is None:
				n_points = DEFAULT_POINTS
			else:
				n_points = 2 * int(math.ceil(half_width / step)) + 1
		grid = cls(float(half_width), int(n_points))

		v_asym = asymptote(spec)
		ends = evaluate(spec, np.array([-grid.half_width, grid.half_width]))
		deviation = float(np.max(np.abs(ends - v_asym)))
		if deviation > eps_asym * max(1.0, abs(v_asym)):
			raise NotAsymptoticallyFlat(
				f"|V(+-L) - V_asym| = {deviation:.3e} exceeds {eps_asym:.1e} at L = {grid.half_width}"
			)
		logger.debug(f"Grid for {spec.kind.value}: L={grid.half_width}, n={grid.n_points}, h={grid.step:.3e}")
		return grid

	def index_of(self, x: float) -> int:
		"""Index of the grid point at x; x must lie on the grid"""
		j = int(round(x / self.step)) + self.center_index
		if j < 0 or j >= self.n_points or abs(self.x[j] - x) > 1e-6 * self.step:
			raise OutOfRange(f"x={x} is not a point of the grid (L={self.half_width}, n={self.n_points})")
		return j

	def mirror(self, values: np.ndarray) -> np.ndarray:
		"""values(-x_j) by exact index reflection"""
		return values[::-1]

	def refined(self) -> 'Grid':
		"""Same interval with half the step"""
		return Grid(self.half_width, 2 * self.n_points - 1)

	def to_dict(self):
		return {"half_width": self.half_width, "n_points": self.n_points, "step": self.step}

@dataclass
class Wavefunction:
	"""psi and psi' sampled on a grid at complex energy E, with k^2 = E - V_asym"""
	grid: Grid
	psi: np.ndarray
	dpsi: np.ndarray
	energy: complex
	k: complex
	span: Tuple[int, int] = field(default=None)

	def __post_init__(self):
		self.psi = np.asarray(self.psi, dtype=complex)
		self.dpsi = np.asarray(self.dpsi, dtype=complex)
		if self.psi.shape != (self.grid.n_points,) or self.dpsi.shape != (self.grid.n_points,):
			raise ValueError("psi and dpsi must match the grid length")
		if self.span is None:
			self.span = (0, self.grid.n_points - 1)

	@property
	def x(self) -> np.ndarray:
		return self.grid.x

	@property
	def is_complete(self) -> bool:
		"""True when every grid point has been integrated"""
		return self.span == (0, self.grid.n_points - 1)

	def require_complete(self) -> 'Wavefunction':
		if not self.is_complete:
			raise IncompleteWavefunction(f"wavefunction only covers indices {self.span}")
		return self

	def scaled(self, factor: complex) -> 'Wavefunction':
		return Wavefunction(self.grid, self.psi * factor, self.dpsi * factor, self.energy, self.k, self.span)

	def normalized(self) -> 'Wavefunction':
		"""Scale so that max |psi| = 1"""
		peak = np.nanmax(np.abs(self.psi))
		return self.scaled(1.0 / peak)
