"""
Shared test fixtures for risynth.
Provides reusable fixtures for all test layers.
"""

import shutil
from pathlib import Path

import pytest

from risynth.internal.domain.entities import MM, Frequency, make_grid_layout
from risynth.internal.domain.unit_cell import IdealOneBitCell, UnitCellKind
from risynth.internal.infra.config import get_test_settings
from risynth.internal.repository.state_table_repository import CsvStateTableRepository

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data" / "unit_cells"
SCENARIO_DIR = REPO_ROOT / "scenarios"

# Half a wavelength at 140 GHz
HALF_WAVE_140_MM = 1.07068735


@pytest.fixture
def data_dir() -> Path:
    """Directory holding the shipped unit-cell tables."""
    return DATA_DIR


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture
def f140() -> Frequency:
    return Frequency.from_ghz(140.0)


@pytest.fixture
def f150() -> Frequency:
    return Frequency.from_ghz(150.0)


@pytest.fixture
def steering_layout():
    """20x20 array at 1 mm pitch."""
    return make_grid_layout(20, 20, 1.0 * MM)


@pytest.fixture
def half_wave_layout():
    """10x10 array at half a wavelength (140 GHz)."""
    return make_grid_layout(10, 10, HALF_WAVE_140_MM * MM)


@pytest.fixture
def ideal_reflective(f140):
    """Lossless 0/180 degree reflective table at 140 GHz."""
    return IdealOneBitCell().to_state_table(f140, f140)


@pytest.fixture
def ideal_transmissive(f140):
    return IdealOneBitCell(kind=UnitCellKind.TRANSMISSIVE).to_state_table(f140, f140)


@pytest.fixture
def table_repository() -> CsvStateTableRepository:
    return CsvStateTableRepository()


@pytest.fixture
def pcm_table(table_repository):
    """Digitized PCM T-RIS table (110-170 GHz)."""
    return table_repository.load(DATA_DIR / "pcm_tris.csv")


@pytest.fixture
def vprofile_table(table_repository):
    return table_repository.load(DATA_DIR / "synthetic_vprofile.csv")


@pytest.fixture
def settings():
    """Deterministic settings (two worker threads)."""
    return get_test_settings()


@pytest.fixture
def workspace(tmp_path) -> Path:
    """Copy of the shipped scenarios and tables, so runs write under tmp_path."""
    shutil.copytree(SCENARIO_DIR, tmp_path / "scenarios")
    shutil.copytree(REPO_ROOT / "data", tmp_path / "data")
    return tmp_path
