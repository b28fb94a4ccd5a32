import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from ptlab.errors import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ("scatter", "identities", "spectrum", "phase-diagram", "correlation", "scarf2-validate")

@dataclass
class PotentialConfig:
	"""Which potential to build"""
	kind: str = "scarf2"
	a_pot: float = 0.0
	b_pot: float = 0.0
	alpha: float = 1.0
	depth: float = 0.0
	coupling: float = 0.0
	v_asym: float = 0.0
	custom: Optional[str] = None

@dataclass
class GridConfig:
	"""Grid overrides; None keeps the potential's default grid"""
	half_width: Optional[float] = None
	step: Optional[float] = None
	n_points: Optional[int] = None
	eps_asym: float = 1e-10

@dataclass
class ToleranceConfig:
	"""Root-finding and classification tolerances"""
	tol: float = 1e-10
	mismatch: float = 1e-8
	imag: float = 1e-8
	pair: float = 1e-6

@dataclass
class SweepConfig:
	"""k values, scans and the eigenvalue search box"""
	k: List[float] = field(default_factory=list)
	k_range: Optional[str] = None
	b_range: Optional[str] = None
	coupling_range: Optional[str] = None
	emin: Optional[float] = None
	emax: Optional[float] = None
	eimax: float = 1.0
	seeds: int = 7
	workers: int = 4
	eigen: bool = False
	state: int = 0

@dataclass
class OutputConfig:
	"""Where reports go"""
	out: Optional[str] = None
	format: str = "json"
	log_dir: str = "./logs"

SECTIONS = {
	"potential": PotentialConfig,
	"grid": GridConfig,
	"tolerances": ToleranceConfig,
	"sweep": SweepConfig,
	"output": OutputConfig,
}

def infer_kind(potential_keys, default: str = "scarf2") -> str:
	"""Potential kind implied by which potential settings were given"""
	keys = set(potential_keys)
	if "custom" in keys:
		return "custom"
	if keys & {"depth", "coupling", "v_asym"}:
		return "scarf2-strengths"
	if keys & {"a_pot", "b_pot"}:
		return "scarf2"
	return default

# flat names as spelled on the command line
FLAG_PATHS = {
	"kind": ("potential", "kind"),
	"A": ("potential", "a_pot"),
	"B": ("potential", "b_pot"),
	"alpha": ("potential", "alpha"),
	"depth": ("potential", "depth"),
	"coupling": ("potential", "coupling"),
	"V-asym": ("potential", "v_asym"),
	"custom": ("potential", "custom"),
	"L": ("grid", "half_width"),
	"h": ("grid", "step"),
	"n-points": ("grid", "n_points"),
	"tol": ("tolerances", "tol"),
	"k": ("sweep", "k"),
	"k-range": ("sweep", "k_range"),
	"B-range": ("sweep", "b_range"),
	"coupling-range": ("sweep", "coupling_range"),
	"emin": ("sweep", "emin"),
	"emax": ("sweep", "emax"),
	"eimax": ("sweep", "eimax"),
	"seeds": ("sweep", "seeds"),
	"workers": ("sweep", "workers"),
	"eigen": ("sweep", "eigen"),
	"state": ("sweep", "state"),
	"out": ("output", "out"),
	"format": ("output", "format"),
	"log-dir": ("output", "log_dir"),
}

@dataclass
class JobConfig:
	"""Complete job configuration"""
	command: str
	potential: PotentialConfig = field(default_factory=PotentialConfig)
	grid: GridConfig = field(default_factory=GridConfig)
	tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
	sweep: SweepConfig = field(default_factory=SweepConfig)
	output: OutputConfig = field(default_factory=OutputConfig)

	@classmethod
	def from_dict(cls, config_dict: Dict[str, Any]) -> 'JobConfig':
		"""Create JobConfig from nested sections and/or flat flag names (e.g., from YAML); flat names win"""
		sections = {name: {} for name in SECTIONS}
		command = config_dict.get("command")
		flat = {}
		for key, value in config_dict.items():
			if key == "command":
				continue
			if key in SECTIONS:
				if not isinstance(value, dict):
					raise ConfigError("section must be a mapping", field=key)
				sections[key].update(value)
			elif key in FLAG_PATHS:
				flat[key] = value
			else:
				raise ConfigError("unknown setting", field=key)
		for key, value in flat.items():
			section, name = FLAG_PATHS[key]
			sections[section][name] = value
		if "kind" not in sections["potential"]:
			sections["potential"]["kind"] = infer_kind(k for k, v in sections["potential"].items() if v is not None)

		if command is None:
			raise ConfigError("missing command", field="command")
		built = {}
		for name, section_cls in SECTIONS.items():
			known = {f.name for f in fields(section_cls)}
			for key in sections[name]:
				if key not in known:
					raise ConfigError("unknown setting", field=f"{name}.{key}")
			built[name] = section_cls(**sections[name])
		if isinstance(built["sweep"].k, (int, float)):
			built["sweep"].k = [built["sweep"].k]
		return cls(command=command, **built)

	def merged_with(self, overrides: Dict[str, Any]) -> 'JobConfig':
		"""Flag values (flat names, None = not given) win over file values"""
		given = {key: value for key, value in overrides.items() if value is not None}
		merged = self.to_dict()
		if "command" in given:
			merged["command"] = given.pop("command")
		for key, value in given.items():
			section, name = FLAG_PATHS[key]
			merged[section][name] = value
		potential_flags = [FLAG_PATHS[key][1] for key in given if FLAG_PATHS[key][0] == "potential"]
		if "kind" not in given and potential_flags:
			merged["potential"]["kind"] = infer_kind(potential_flags, default=merged["potential"]["kind"])
		return JobConfig.from_dict(merged)

	def to_dict(self) -> Dict[str, Any]:
		return asdict(self)

def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
	"""Read a JSON or YAML job file; parse errors carry line context"""
	path = Path(path)
	if not path.exists():
		raise ConfigError(f"config file not found: {path}", field="config")
	text = path.read_text()
	if path.suffix.lower() == ".json":
		try:
			data = json.loads(text)
		except json.JSONDecodeError as e:
			raise ConfigError(f"invalid JSON in {path}: {e.msg} (column {e.colno})", line=e.lineno)
	else:
		try:
			data = yaml.safe_load(text)
		except yaml.YAMLError as e:
			mark = getattr(e, "problem_mark", None)
			line = mark.line + 1 if mark is not None else None
			raise ConfigError(f"invalid YAML in {path}: {getattr(e, 'problem', e)}", line=line)
	if data is None:
		data = {}
	if not isinstance(data, dict):
		raise ConfigError(f"{path} must contain a mapping at top level", line=1)
	logger.info(f"Loaded job config from {path}")
	return data
