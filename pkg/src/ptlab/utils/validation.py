import logging
from typing import Any, Dict, Optional
from dataclasses import dataclass

from ptlab.errors import ConfigError
from ptlab.models.config import COMMANDS, JobConfig
from ptlab.sweep import parse_range

logger = logging.getLogger(__name__)

POTENTIAL_KINDS = ("scarf2", "scarf2-strengths", "custom")
FORMATS = ("json", "csv")

@dataclass
class ValidationResult:
	"""Result of validating one config field"""
	is_valid: bool
	normalized_value: Any
	error_message: Optional[str] = None

class ConfigValidator:
	"""Checks on individual job settings"""

	@staticmethod
	def validate_choice(value: Any, choices, field_name: str) -> ValidationResult:
		if value not in choices:
			return ValidationResult(False, value, f"{field_name} must be one of {', '.join(choices)}, got '{value}'")
		return ValidationResult(True, value)

	@staticmethod
	def validate_positive(value: Any, field_name: str, optional: bool = False) -> ValidationResult:
		"""Finite number > 0"""
		if value is None:
			if optional:
				return ValidationResult(True, None)
			return ValidationResult(False, None, f"{field_name} is required")
		try:
			number = float(value)
		except (TypeError, ValueError):
			return ValidationResult(False, value, f"{field_name} must be a number, got '{value}'")
		if not number > 0 or number == float("inf"):
			return ValidationResult(False, number, f"{field_name} must be positive and finite, got {number}")
		return ValidationResult(True, number)

	@staticmethod
	def validate_finite(value: Any, field_name: str) -> ValidationResult:
		try:
			number = float(value)
		except (TypeError, ValueError):
			return ValidationResult(False, value, f"{field_name} must be a number, got '{value}'")
		if number != number or abs(number) == float("inf"):
			return ValidationResult(False, number, f"{field_name} must be finite")
		return ValidationResult(True, number)

	@staticmethod
	def validate_index(value: Any, field_name: str) -> ValidationResult:
		"""Integer >= 0"""
		if not isinstance(value, int) or isinstance(value, bool):
			return ValidationResult(False, value, f"{field_name} must be an integer, got '{value}'")
		if value < 0:
			return ValidationResult(False, value, f"{field_name} must be >= 0, got {value}")
		return ValidationResult(True, value)

	@staticmethod
	def validate_odd(value: Any, field_name: str = "n_points") -> ValidationResult:
		if value is None:
			return ValidationResult(True, None)
		if not isinstance(value, int) or isinstance(value, bool):
			return ValidationResult(False, value, f"{field_name} must be an integer")
		if value < 3 or value % 2 == 0:
			return ValidationResult(False, value, f"{field_name} must be odd and >= 3, got {value}")
		return ValidationResult(True, value)

	@staticmethod
	def validate_range(value: Optional[str], field_name: str) -> ValidationResult:
		"""lo:hi:n with n >= 1"""
		if value is None:
			return ValidationResult(True, None)
		try:
			values = parse_range(str(value))
		except ValueError as e:
			return ValidationResult(False, value, f"{field_name}: {e}")
		return ValidationResult(True, values)

def validate_job_config(config: JobConfig) -> Dict[str, ValidationResult]:
	"""Validate every field the command will use"""
	results = {}
	pot = config.potential

	results['command'] = ConfigValidator.validate_choice(config.command, COMMANDS, "command")
	results['potential.kind'] = ConfigValidator.validate_choice(pot.kind, POTENTIAL_KINDS, "potential kind")
	results['potential.alpha'] = ConfigValidator.validate_positive(pot.alpha, "alpha")
	for name in ("a_pot", "b_pot", "depth", "coupling", "v_asym"):
		results[f'potential.{name}'] = ConfigValidator.validate_finite(getattr(pot, name), name)
	if pot.kind == "custom" and not pot.custom:
		results['potential.custom'] = ValidationResult(False, None, "custom potentials need a CSV path (--custom)")
	if config.command == "scarf2-validate" and pot.kind != "scarf2":
		results['potential.kind'] = ValidationResult(False, pot.kind, "scarf2-validate needs the scarf2 potential (--A/--B)")

	results['grid.half_width'] = ConfigValidator.validate_positive(config.grid.half_width, "L", optional=True)
	results['grid.step'] = ConfigValidator.validate_positive(config.grid.step, "h", optional=True)
	results['grid.n_points'] = ConfigValidator.validate_odd(config.grid.n_points)
	results['grid.eps_asym'] = ConfigValidator.validate_positive(config.grid.eps_asym, "eps_asym")

	for name in ("tol", "mismatch", "imag", "pair"):
		results[f'tolerances.{name}'] = ConfigValidator.validate_positive(getattr(config.tolerances, name), name)

	sweep = config.sweep
	for name in ("k_range", "b_range", "coupling_range"):
		results[f'sweep.{name}'] = ConfigValidator.validate_range(getattr(sweep, name), name.replace("_", "-"))
	for i, k in enumerate(sweep.k):
		results[f'sweep.k[{i}]'] = ConfigValidator.validate_positive(k, "k")
	if config.command in ("scatter", "identities", "scarf2-validate") and not sweep.k and not sweep.k_range:
		results['sweep.k'] = ValidationResult(False, None, f"{config.command} needs --k or --k-range")
	if config.command == "correlation" and not sweep.eigen and not sweep.k and not sweep.k_range:
		results['sweep.k'] = ValidationResult(False, None, "correlation needs --k or --eigen")
	if config.command == "phase-diagram":
		scan = sweep.coupling_range if pot.kind == "scarf2-strengths" else sweep.b_range
		if scan is None:
			results['sweep.scan'] = ValidationResult(
				False, None, "phase-diagram needs --B-range (scarf2) or --coupling-range (scarf2-strengths)"
			)
	results['sweep.eimax'] = ConfigValidator.validate_positive(sweep.eimax, "eimax")
	results['sweep.seeds'] = ConfigValidator.validate_positive(sweep.seeds, "seeds")
	results['sweep.workers'] = ConfigValidator.validate_positive(sweep.workers, "workers")
	if config.command == "correlation" and sweep.eigen:
		results['sweep.state'] = ConfigValidator.validate_index(sweep.state, "state")
	if sweep.emin is not None and sweep.emax is not None and not sweep.emin < sweep.emax:
		results['sweep.emin'] = ValidationResult(False, sweep.emin, "emin must be below emax")

	results['output.format'] = ConfigValidator.validate_choice(config.output.format, FORMATS, "format")
	if config.output.format == "csv" and config.command not in ("correlation", "phase-diagram", "scatter"):
		results['output.format'] = ValidationResult(False, "csv", f"csv output is not available for {config.command}")

	return results

def require_valid(config: JobConfig) -> JobConfig:
	"""Raise one ConfigError naming every invalid field"""
	invalid = {name: r for name, r in validate_job_config(config).items() if not r.is_valid}
	if invalid:
		lines = [f"{name}: {r.error_message}" for name, r in sorted(invalid.items())]
		logger.error(f"Invalid job config: {len(invalid)} problem(s)")
		raise ConfigError("invalid configuration:\n  " + "\n  ".join(lines), field=sorted(invalid)[0])
	return config
