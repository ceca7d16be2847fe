"""Pytest configuration and fixtures."""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from wavelab.config import LabSettings
from wavelab.evolution import SpaceTimeField, solve
from wavelab.radial import BlowupFamily, Grid, InitialDataSet, build_on_grid


@pytest.fixture
def lab_settings(tmp_path: Path) -> LabSettings:
    """Create settings that write into a temporary directory."""
    return LabSettings(
        log_level="WARNING",
        output_dir=tmp_path / "results",
        workers=1,
        default_seed=0,
    )


@pytest.fixture
def small_grid() -> Grid:
    """A coarse grid that covers blow-up data up to t = 4."""
    return Grid.build(0.25, 4.0, 4.0)


@pytest.fixture
def blowup_data(small_grid: Grid) -> InitialDataSet:
    """Blow-up data with B = 1 and kappa = 3/2 on the small grid's mesh."""
    return build_on_grid(BlowupFamily(1.0, 1.5), small_grid)


@pytest.fixture
def constant_mesh() -> np.ndarray:
    """A fine mesh on [0, 20]."""
    return np.linspace(0.0, 20.0, 801)


@pytest.fixture(scope="session")
def solved_blowup() -> SpaceTimeField:
    """The gamma = 2 solution for blow-up data at eps = 1, B = 1 up to t = 6."""
    grid = Grid.build(0.125, 6.0, 4.0)
    data = build_on_grid(BlowupFamily(1.0, 1.5), grid)
    field, _ = solve(data, 1.0, 2.0, grid)
    return field


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write YAML text into the temporary directory and return its path."""

    def _write(text: str, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


@pytest.fixture
def blowup_config_text() -> str:
    """A small blow-up experiment."""
    return """
name: "small_blowup"
seed: 3
gamma: 2.0
data:
  family: "blowup"
  amplitude: 1.0
  kappa: 1.5
grid:
  dr: 0.25
  t_max: 4.0
solve:
  eps: 1.0
"""


@pytest.fixture
def zero_config_text() -> str:
    """Zero data: the solution vanishes identically."""
    return """
name: "zero"
gamma: 2.0
data:
  family: "gaussian"
  amplitude: 0.0
  width: 1.0
grid:
  dr: 0.25
  t_max: 2.0
solve:
  eps: 0.0
"""
