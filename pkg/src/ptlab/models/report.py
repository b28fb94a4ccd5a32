from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ptlab.models.grid import Grid

class Incidence(Enum):
	LEFT = "left"
	RIGHT = "right"

class Classification(Enum):
	BOUND = "bound"
	RESONANCE_PAIR_MEMBER = "resonance-pair-member"

class Phase(Enum):
	UNBROKEN = "unbroken"
	BROKEN = "broken"

@dataclass
class AsymptoticCoefficients:
	"""psi = A e^{ikx} + B e^{-ikx} on the left, C e^{ikx} + D e^{-ikx} on the right"""
	cf_a: complex
	cf_b: complex
	cf_c: complex
	cf_d: complex

	def __post_init__(self):
		if not any(abs(c) > 0 for c in (self.cf_a, self.cf_b, self.cf_c, self.cf_d)):
			raise ValueError("asymptotic coefficients are all zero")

	def as_tuple(self):
		return self.cf_a, self.cf_b, self.cf_c, self.cf_d

	def to_dict(self) -> Dict[str, Any]:
		return {"A": self.cf_a, "B": self.cf_b, "C": self.cf_c, "D": self.cf_d}

@dataclass
class TransferMatrix:
	"""M maps (A, B) to (C, D)"""
	m: np.ndarray
	k: complex

	@property
	def det(self) -> complex:
		return complex(self.m[0, 0] * self.m[1, 1] - self.m[0, 1] * self.m[1, 0])

	def to_dict(self) -> Dict[str, Any]:
		return {"k": self.k, "M": self.m}

@dataclass
class ScatteringMatrix:
	"""S maps incoming (A, D) to outgoing (B, C)"""
	s: np.ndarray
	k: complex
	convention: str = "in-out"

	@property
	def r_left(self) -> complex:
		return complex(self.s[0, 0])

	@property
	def t_left(self) -> complex:
		return complex(self.s[1, 0])

	@property
	def r_right(self) -> complex:
		return complex(self.s[1, 1])

	@property
	def t_right(self) -> complex:
		return complex(self.s[0, 1])

	def to_dict(self) -> Dict[str, Any]:
		return {"k": self.k, "S": self.s, "convention": self.convention}

@dataclass
class IdentityReport:
	"""Defect name -> max-norm of the violated identity"""
	params: Dict[str, Any]
	defects: Dict[str, float] = field(default_factory=dict)

	def __post_init__(self):
		for name, value in self.defects.items():
			if not (np.isfinite(value) and value >= 0):
				raise ValueError(f"defect {name} must be finite and >= 0, got {value}")

	def to_dict(self) -> Dict[str, Any]:
		return {"params": self.params, "defects": dict(self.defects)}

@dataclass
class SpectralPoint:
	"""A located eigenvalue with kappa = sqrt(V_asym - E), Re kappa > 0"""
	energy: complex
	kappa: complex
	classification: Classification
	mismatch: float
	pt_defect: float
	n_index: Optional[int] = None
	partner_defect: Optional[float] = None

	def to_dict(self) -> Dict[str, Any]:
		result = {
			"E": self.energy,
			"kappa": self.kappa,
			"class": self.classification.value,
			"mismatch": self.mismatch,
			"pt_defect": self.pt_defect,
			"n_index": self.n_index,
		}
		if self.partner_defect is not None:
			result["partner_defect"] = self.partner_defect
		return result

@dataclass
class CorrelationField:
	"""rho(x) = psi*(-x) psi(x) and its current q on a symmetric grid"""
	rho: np.ndarray
	q: np.ndarray
	grid: Grid
	energy: complex

	@property
	def x(self) -> np.ndarray:
		return self.grid.x

@dataclass
class SeedFailure:
	"""A Newton seed that produced no accepted eigenvalue"""
	seed: complex
	reason: str
	last_energy: Optional[complex] = None

	def to_dict(self) -> Dict[str, Any]:
		return {"seed": self.seed, "reason": self.reason, "last_E": self.last_energy}

@dataclass
class SpectrumResult:
	"""Accepted eigenvalues plus the seeds that failed; iterates over the points"""
	points: List[SpectralPoint]
	failures: List[SeedFailure] = field(default_factory=list)

	def __iter__(self):
		return iter(self.points)

	def __len__(self):
		return len(self.points)

	def __getitem__(self, index):
		return self.points[index]

	@property
	def energies(self) -> List[complex]:
		return [p.energy for p in self.points]
