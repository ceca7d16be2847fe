"""CSV/JSON result files carrying provenance headers."""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .evolution.field import CheckpointFormat, SpaceTimeField
from .experiment_config import ExperimentConfig, config_hash
from .radial.grid import Grid
from .radial.profile import RadialProfile

logger = logging.getLogger(__name__)


def _json_safe(value: Any) -> Any:
    """Replace non-finite floats with None so reports stay valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class Provenance:
    """What produced a result file. Contains no wall-clock time."""

    config_hash: str
    config_name: str
    seed: int | None
    version: str
    grid: dict[str, float] = field(default_factory=dict)

    @classmethod
    def for_config(cls, config: ExperimentConfig, grid: Grid | None = None, seed: int | None = None) -> "Provenance":
        from . import __version__

        return cls(
            config_hash=config_hash(config),
            config_name=config.name,
            seed=config.seed if seed is None else seed,
            version=__version__,
            grid=grid.describe() if grid is not None else {},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "config_name": self.config_name,
            "seed": self.seed,
            "version": self.version,
            **self.grid,
        }


class ResultWriter:
    """Writes deterministic artifacts into one directory."""

    def __init__(self, directory: Path | str, provenance: Provenance):
        """Initialize the writer.

        Args:
            directory: Output directory; created on first write.
            provenance: Header embedded in every file.
        """
        self.directory = Path(directory)
        self.provenance = provenance
        self.written: list[Path] = []

    def _path(self, name: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        self.written.append(path)
        return path

    def write_csv(self, name: str, rows: Iterable[dict[str, Any]], columns: list[str] | None = None) -> Path:
        """Write rows as CSV below a `# key: value` provenance block."""
        rows = list(rows)
        if columns is None:
            columns = list(rows[0].keys()) if rows else []
        buffer = io.StringIO()
        for key, value in self.provenance.to_dict().items():
            buffer.write(f"# {key}: {json.dumps(value)}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c, "")) for c in columns])
        path = self._path(name)
        path.write_text(buffer.getvalue())
        logger.debug(f"wrote {len(rows)} rows to {path}")
        return path

    def write_json(self, name: str, payload: dict[str, Any]) -> Path:
        """Write a JSON report with a `provenance` object."""
        document = {"provenance": self.provenance.to_dict(), **_json_safe(payload)}
        path = self._path(name)
        path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
        logger.debug(f"wrote report {path}")
        return path

    def write_field(self, name: str, field_: SpaceTimeField, fmt: CheckpointFormat = "npz") -> Path:
        """Write a field checkpoint with the provenance header."""
        suffix = ".npz" if fmt == "npz" else ".csv"
        path = self._path(f"{name}{suffix}")
        header = {k: v for k, v in self.provenance.to_dict().items() if k not in field_.grid.describe()}
        return field_.save(path, fmt=fmt, header=header)

    def write_profile(self, name: str, profile: RadialProfile) -> Path:
        """Write a radial profile as lambda,value CSV with the provenance block."""
        return profile.to_csv(self._path(name), metadata=self.provenance.to_dict())
