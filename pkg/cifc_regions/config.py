"""Runtime settings read from the environment.

Configuration:
    CIFC_THREADS: Worker cap for policy, grid and trial sweeps; 0 picks
        ``os.cpu_count()`` (default: 0)
    CIFC_LOG_LEVEL: Log level used by the command-line front end (default: WARNING)
    CIFC_SEARCH_CAP: Largest decoder search space, the product of the three
        codebook sizes (default: 65536)
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Mapping, Optional, TypeVar

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

THREADS_VAR = "CIFC_THREADS"
LOG_LEVEL_VAR = "CIFC_LOG_LEVEL"
SEARCH_CAP_VAR = "CIFC_SEARCH_CAP"

DEFAULT_SEARCH_CAP = 2 ** 16

T = TypeVar("T")
R = TypeVar("R")


class RuntimeSettings(BaseModel):
    """Process-wide knobs.

    Attributes:
        threads (int): Worker cap, 0 meaning one worker per CPU.
        log_level (str): Standard logging level name.
        search_cap (int): Cap on the product of codebook sizes.
    """
    threads: int = Field(0, ge=0)
    log_level: str = "WARNING"
    search_cap: int = Field(DEFAULT_SEARCH_CAP, ge=1)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.strip().upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return level

    @property
    def workers(self) -> int:
        return self.threads or (os.cpu_count() or 1)


def load_settings(environ: Optional[Mapping[str, str]] = None) -> RuntimeSettings:
    """Build settings from environment variables.

    Args:
        environ: Mapping to read instead of ``os.environ``.

    Raises:
        ValidationError: If a variable holds an invalid value.
    """
    env = os.environ if environ is None else environ
    return RuntimeSettings(
        threads=env.get(THREADS_VAR, "0"),
        log_level=env.get(LOG_LEVEL_VAR, "WARNING"),
        search_cap=env.get(SEARCH_CAP_VAR, str(DEFAULT_SEARCH_CAP)),
    )


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Apply ``fn`` to every item, returning results in input order.

    Args:
        fn: Pure function of one item.
        items: Work items.
        workers: Thread count; defaults to the ``CIFC_THREADS`` setting.
    """
    items = list(items)
    if workers is None:
        workers = load_settings().workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {min(workers, len(items))} threads")
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
