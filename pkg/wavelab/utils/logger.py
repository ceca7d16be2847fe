"""Logging setup and run-scoped loggers."""

import logging
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, MutableMapping

CONSOLE_FORMAT = "%(asctime)s | %(levelname)-8s | %(message)s"
FILE_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"

# Third-party loggers that flood DEBUG output
QUIET_LOGGERS = ("matplotlib", "numba", "h5py")


def setup_logging(level: str = "INFO", log_dir: Path | None = None) -> Path | None:
    """Configure the root logger for a CLI invocation.

    The console gets `level`; the optional per-invocation file always records DEBUG,
    so slab-level solver progress is kept even on quiet runs.

    Args:
        level: Console level name (DEBUG, INFO, WARNING, ERROR, CRITICAL).
        log_dir: Directory for a `wavelab_<timestamp>.log` file.

    Returns:
        Path of the log file, if one was opened.
    """
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(getattr(logging, level.upper(), logging.INFO))
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt="%H:%M:%S"))
    handlers: list[logging.Handler] = [console]

    log_file = None
    if log_dir:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"wavelab_{datetime.now():%Y%m%d_%H%M%S}.log"
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        handlers.append(file_handler)

    logging.basicConfig(level=logging.DEBUG, handlers=handlers, force=True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    return log_file


class RunLogger(logging.LoggerAdapter):
    """Logger that prefixes every message with a run key such as `eps=0.800`."""

    def __init__(self, run_key: str):
        super().__init__(logging.getLogger(f"wavelab.run.{run_key}"), {"run_key": run_key})
        self.run_key = run_key

    def process(self, msg: Any, kwargs: MutableMapping[str, Any]) -> tuple[Any, MutableMapping[str, Any]]:
        return f"[{self.run_key}] {msg}", kwargs

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        """Log the wall time of a stage at INFO. Never written to result files."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.info(f"{stage} took {time.perf_counter() - start:.2f}s")
