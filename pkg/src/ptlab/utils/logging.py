import json
import logging
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, Any, Optional, List
from dataclasses import dataclass, asdict, field
import uuid

@dataclass
class StepLog:
	"""Structured log entry for one computation step of a job"""
	timestamp: str
	session_id: str
	step_id: str
	command: str
	target: str
	success: bool
	execution_time: float
	error_message: Optional[str] = None
	details: Dict[str, Any] = field(default_factory=dict)

	def to_dict(self) -> Dict[str, Any]:
		"""Convert to dictionary for JSON serialization"""
		return asdict(self)

@dataclass
class SessionLog:
	"""Log entry for a job session"""
	session_id: str
	start_time: str
	end_time: Optional[str]
	command: str
	total_steps: int
	successful_steps: int
	failed_steps: int
	final_state: str
	exit_code: int
	report_path: Optional[str] = None

	def to_dict(self) -> Dict[str, Any]:
		"""Convert to dictionary for JSON serialization"""
		return asdict(self)

class RunLogger:
	"""Structured logging for ptlab jobs, kept apart from the reports"""

	def __init__(self, log_dir: str = "./logs", session_id: str = None, command: str = "unknown"):
		self.log_dir = Path(log_dir)
		self.log_dir.mkdir(parents=True, exist_ok=True)

		self.session_id = session_id or str(uuid.uuid4())[:8]
		self.session_start = datetime.now().isoformat()
		self.command = command

		self.step_log_file = self.log_dir / f"steps_{self.session_id}.jsonl"
		self.session_log_file = self.log_dir / f"session_{self.session_id}.json"
		self.debug_log_file = self.log_dir / f"debug_{self.session_id}.log"

		self._setup_debug_logger()

		self.steps_logged: List[StepLog] = []
		self.session_start_time = time.time()

		self.logger = logging.getLogger(f"ptlab.run.{self.session_id}")
		self.logger.info(f"Job session started: {self.session_id} ({command})")

	def _setup_debug_logger(self):
		"""Send this session's records and the library's to the debug file"""
		self._file_handler = logging.FileHandler(self.debug_log_file)
		self._file_handler.setFormatter(logging.Formatter(
			'%(asctime)s - %(name)s - %(levelname)s - %(message)s'
		))

		run_logger = logging.getLogger(f"ptlab.run.{self.session_id}")
		run_logger.setLevel(logging.DEBUG)
		run_logger.addHandler(self._file_handler)
		# Prevent duplicate logs
		run_logger.propagate = False

		library_logger = logging.getLogger("ptlab")
		library_logger.setLevel(logging.DEBUG)
		library_logger.addHandler(self._file_handler)

	def log_step(
		self,
		target: str,
		success: bool = True,
		execution_time: float = 0.0,
		error_message: Optional[str] = None,
		details: Optional[Dict[str, Any]] = None
	) -> str:
		"""Log one computation step (a k value, a scan value, a seed batch)"""
		step_id = str(uuid.uuid4())[:8]
		step_log = StepLog(
			timestamp=datetime.now().isoformat(),
			session_id=self.session_id,
			step_id=step_id,
			command=self.command,
			target=target,
			success=success,
			execution_time=execution_time,
			error_message=error_message,
			details=details or {}
		)

		with open(self.step_log_file, 'a') as f:
			f.write(json.dumps(step_log.to_dict(), default=str) + '\n')

		self.steps_logged.append(step_log)

		status = "SUCCESS" if success else "FAILED"
		self.logger.info(f"Step {step_id}: {self.command} {target} - {status} ({execution_time:.2f}s)")
		if error_message:
			self.logger.error(f"Step {step_id} error: {error_message}")

		return step_id

	def log_session_end(self, final_state: str, exit_code: int, report_path: Optional[str] = None):
		"""Write the session summary and detach the file handler"""
		successful_steps = sum(1 for step in self.steps_logged if step.success)
		session_log = SessionLog(
			session_id=self.session_id,
			start_time=self.session_start,
			end_time=datetime.now().isoformat(),
			command=self.command,
			total_steps=len(self.steps_logged),
			successful_steps=successful_steps,
			failed_steps=len(self.steps_logged) - successful_steps,
			final_state=final_state,
			exit_code=exit_code,
			report_path=report_path
		)

		with open(self.session_log_file, 'w') as f:
			json.dump(session_log.to_dict(), f, indent=2)

		duration = time.time() - self.session_start_time
		self.logger.info(f"Session ended: {final_state} (duration: {duration:.1f}s, steps: {len(self.steps_logged)}, exit {exit_code})")
		self.close()

	def close(self):
		logging.getLogger("ptlab").removeHandler(self._file_handler)
		logging.getLogger(f"ptlab.run.{self.session_id}").removeHandler(self._file_handler)
		self._file_handler.close()

	def get_session_summary(self) -> Dict[str, Any]:
		"""Get current session summary"""
		successful_steps = sum(1 for step in self.steps_logged if step.success)
		return {
			"session_id": self.session_id,
			"command": self.command,
			"duration": time.time() - self.session_start_time,
			"total_steps": len(self.steps_logged),
			"successful_steps": successful_steps,
			"failed_steps": len(self.steps_logged) - successful_steps,
			"success_rate": successful_steps / len(self.steps_logged) if self.steps_logged else 0.0
		}

def setup_run_logging(session_id: str = None, log_dir: str = "./logs", command: str = "unknown") -> RunLogger:
	"""Set up logging for a job session"""
	return RunLogger(log_dir=log_dir, session_id=session_id, command=command)
