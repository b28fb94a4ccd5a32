"""Parameter fan-out for k sweeps and coupling scans."""

import asyncio
import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence

from ptlab.errors import ConfigError, PtLabError

logger = logging.getLogger(__name__)


@dataclass
class SweepOutcome:
    """Result of one sweep point; exactly one of value and error is set"""
    param: float
    value: Any = None
    error: Optional[PtLabError] = None
    execution_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


async def fan_out(
    func: Callable[[float], Any],
    params: Sequence[float],
    max_workers: int = 4,
) -> List[SweepOutcome]:
    """
    Run func(param) for every param in worker threads, at most max_workers
    at a time. Library errors are captured per point, except ConfigError,
    which ends the whole sweep. Results come back sorted by param whatever
    the completion order.
    """
    semaphore = asyncio.Semaphore(max(1, max_workers))

    async def run_one(param: float) -> SweepOutcome:
        async with semaphore:
            started = time.time()
            try:
                value = await asyncio.to_thread(func, param)
                return SweepOutcome(param, value=value, execution_time=time.time() - started)
            except ConfigError:
                raise
            except PtLabError as e:
                logger.warning(f"sweep point {param}: {type(e).__name__}: {e}")
                return SweepOutcome(param, error=e, execution_time=time.time() - started)

    outcomes = await asyncio.gather(*(run_one(p) for p in params))
    return sorted(outcomes, key=lambda o: o.param)


def run_sweep(func: Callable[[float], Any], params: Sequence[float], max_workers: int = 4) -> List[SweepOutcome]:
    """Blocking wrapper around fan_out"""
    return asyncio.run(fan_out(func, params, max_workers))


def parse_range(text: str) -> List[float]:
    """'lo:hi:n' -> n evenly spaced values, endpoints included"""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like lo:hi:n, got '{text}'")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise ValueError(f"range needs at least one point, got n={n}")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]
