# Report and CSV writers with deterministic formatting
import json
import logging
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

def to_jsonable(value: Any) -> Any:
	"""Complex numbers become [re, im]; arrays become lists; non-finite floats become null"""
	if hasattr(value, "to_dict"):
		return to_jsonable(value.to_dict())
	if is_dataclass(value) and not isinstance(value, type):
		return to_jsonable(asdict(value))
	if isinstance(value, Enum):
		return value.value
	if isinstance(value, dict):
		return {str(k): to_jsonable(v) for k, v in value.items()}
	if isinstance(value, (list, tuple)):
		return [to_jsonable(v) for v in value]
	if isinstance(value, np.ndarray):
		return [to_jsonable(v) for v in value.tolist()]
	if isinstance(value, (bool, np.bool_)):
		return bool(value)
	if isinstance(value, (int, np.integer)):
		return int(value)
	if isinstance(value, (complex, np.complexfloating)):
		return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
	if isinstance(value, (float, np.floating)):
		value = float(value)
		if not math.isfinite(value):
			logger.warning(f"non-finite value {value} written as null")
			return None
		return value
	return value

def dumps(data: Any) -> str:
	"""Byte-stable JSON text for a report"""
	return json.dumps(to_jsonable(data), sort_keys=True, indent=2) + "\n"

def write_json(path: Union[str, Path], data: Any) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, "w") as f:
		f.write(dumps(data))
	logger.info(f"Wrote report {path}")
	return path

def write_csv(path: Union[str, Path], header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
	"""Columns of equal length, '.' decimal separator, header row first"""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	table = np.column_stack([np.asarray(c, dtype=float) for c in columns])
	np.savetxt(path, table, fmt="%.17g", delimiter=",", header=",".join(header), comments="")
	logger.info(f"Wrote {table.shape[0]} rows to {path}")
	return path
