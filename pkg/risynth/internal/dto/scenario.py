"""
Scenario File Schema

Pydantic models for the versioned TOML scenario format. Units follow the
file's field names (GHz, mm, degrees); conversion to SI happens in the
scenario runner.

Example (R-RIS steering)::

    schema_version = 1
    name = "schottky-steer-30"
    mode = "reflect-steer"
    frequency_ghz = 140.0

    [array]
    nx = 20
    ny = 20
    pitch_mm = 1.0

    [unit_cell]
    ideal = true

    [target]
    theta_deg = 30.0
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_VERSION = 1


class ScenarioMode(str, Enum):
    """What a scenario computes"""
    REFLECT_STEER = "reflect-steer"
    TRANSMIT_COLLIMATE = "transmit-collimate"
    GRATING = "grating"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ArraySection(_Section):
    nx: int = Field(..., ge=1, description="Elements along x")
    ny: int = Field(..., ge=1, description="Elements along y")
    pitch_mm: float = Field(..., gt=0, description="Element pitch along x")
    pitch_y_mm: Optional[float] = Field(None, gt=0, description="Element pitch along y (defaults to pitch_mm)")


class UnitCellSection(_Section):
    """Either a state-table CSV or the ideal 1-bit cell"""
    table: Optional[str] = Field(None, description="State-table CSV, relative to the scenario file")
    ideal: bool = Field(False, description="Use the ideal 0/180 degree cell")
    kind: str = Field("reflective", pattern="^(reflective|transmissive)$")
    loss_db: Tuple[float, float] = Field((0.0, 0.0), description="Ideal-cell loss per state")

    @field_validator("loss_db")
    @classmethod
    def loss_non_negative(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if any(loss < 0 for loss in v):
            raise ValueError("loss_db values must be >= 0")
        return v

    @model_validator(mode="after")
    def exactly_one_source(self) -> "UnitCellSection":
        if self.ideal == (self.table is not None):
            raise ValueError("set exactly one of 'table' or 'ideal = true'")
        return self


class DirectionSection(_Section):
    theta_deg: float = Field(0.0, ge=0, le=90)
    phi_deg: float = 0.0


class FeedSection(_Section):
    """Feed placement; unset values come from the FeedSettings defaults"""
    f_over_d: Optional[float] = Field(None, gt=0)
    edge_taper_db: Optional[float] = Field(None, le=0)
    offset_mm: Tuple[float, float] = (0.0, 0.0)
    q_f: Optional[float] = Field(None, ge=0, description="Feed exponent; overrides edge_taper_db")
    reference_phase_deg: float = 0.0


class GratingSection(_Section):
    channel_spacing_mm: float = Field(..., gt=0)
    fill_pattern: List[bool] = Field(default_factory=lambda: [True], min_length=1)
    incidence_deg: float = Field(0.0, gt=-90, lt=90)
    aperture_mm: float = Field(..., gt=0)
    sweep_ghz: List[float] = Field(default_factory=list, description="Extra frequencies for the mode sweep")

    @field_validator("fill_pattern")
    @classmethod
    def some_channel_filled(cls, v: List[bool]) -> List[bool]:
        if not any(v):
            raise ValueError("at least one channel must be filled")
        return v

    @field_validator("sweep_ghz")
    @classmethod
    def sweep_positive(cls, v: List[float]) -> List[float]:
        if any(f <= 0 for f in v):
            raise ValueError("sweep frequencies must be positive")
        return v


class OutputSection(_Section):
    directory: str = Field(".", description="Output directory, relative to the scenario file")
    prefix: Optional[str] = Field(None, description="File name prefix (defaults to the scenario name)")
    cut_phi_deg: Optional[float] = None
    grid_deg: Optional[float] = Field(None, gt=0)
    element_q: Optional[float] = Field(None, ge=0)
    directivity: bool = Field(False, description="Also integrate directivity over the sphere (transmit mode)")
    gain_sweep_ghz: List[float] = Field(
        default_factory=list, description="Frequencies at which to re-evaluate the transmit gain of the fixed state map"
    )

    @field_validator("gain_sweep_ghz")
    @classmethod
    def gain_sweep_positive(cls, v: List[float]) -> List[float]:
        if any(f <= 0 for f in v):
            raise ValueError("gain sweep frequencies must be positive")
        return v


class Scenario(_Section):
    """Validated scenario file"""
    schema_version: int
    name: str = Field(..., min_length=1, pattern=r"^[A-Za-z0-9._-]+$")
    mode: ScenarioMode
    frequency_ghz: float = Field(..., gt=0)
    array: Optional[ArraySection] = None
    unit_cell: Optional[UnitCellSection] = None
    target: DirectionSection = Field(default_factory=DirectionSection)
    incidence: DirectionSection = Field(default_factory=DirectionSection)
    feed: Optional[FeedSection] = None
    grating: Optional[GratingSection] = None
    output: OutputSection = Field(default_factory=OutputSection)

    @field_validator("schema_version")
    @classmethod
    def supported_version(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v} (expected {SCHEMA_VERSION})")
        return v

    @model_validator(mode="after")
    def mode_sections_present(self) -> "Scenario":
        required = {
            ScenarioMode.REFLECT_STEER: ("array", "unit_cell"),
            ScenarioMode.TRANSMIT_COLLIMATE: ("array", "unit_cell", "feed"),
            ScenarioMode.GRATING: ("grating",),
        }[self.mode]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"mode '{self.mode.value}' requires section(s): {', '.join(missing)}")
        if self.mode is ScenarioMode.TRANSMIT_COLLIMATE and self.unit_cell.ideal and self.unit_cell.kind != "transmissive":
            raise ValueError("transmit-collimate with an ideal cell needs kind = 'transmissive'")
        return self

    @property
    def output_prefix(self) -> str:
        return self.output.prefix or self.name

    def table_path(self, base_dir: Path) -> Optional[Path]:
        if self.unit_cell is None or self.unit_cell.table is None:
            return None
        return (base_dir / self.unit_cell.table).resolve()
