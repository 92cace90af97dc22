"""
Output Documents

Pydantic models for the JSON artifacts (metrics, summary, grating modes).
Their JSON schemas double as the contract the tests validate files against.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class MetricsDocument(BaseModel):
    """Main-beam metrics of a cut (null when no interior peak exists)"""
    model_config = ConfigDict(extra="forbid")

    peak_deg: Optional[float] = Field(..., description="Signed peak angle in the cut")
    peak_db: Optional[float] = Field(..., description="Interpolated peak level")
    sll_db: Optional[float] = Field(..., description="Highest sidelobe relative to the peak")
    hpbw_deg: Optional[float] = Field(..., description="Half-power beamwidth")
    pointing_error_deg: Optional[float] = Field(..., description="|peak - target|")


class ModeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    theta_deg: float
    propagating: bool


class ModeSweepEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frequency_ghz: float
    propagating_count: int
    modes: List[ModeDocument]


class GainSweepEntry(BaseModel):
    """Realized gain of the design-frequency state map at one frequency"""
    model_config = ConfigDict(extra="forbid")

    frequency_ghz: float
    gain_dbi: float


class SummaryDocument(BaseModel):
    """Per-run summary written next to the pattern and metrics files"""
    model_config = ConfigDict(extra="forbid")

    scenario: str
    scenario_hash: str = Field(..., pattern="^[0-9a-f]{16}$")
    mode: str
    frequency_ghz: float
    normalization: str
    metrics: MetricsDocument
    files: List[str]
    state_counts: Optional[Dict[str, int]] = None
    max_residual_deg: Optional[float] = None
    gain_dbi: Optional[float] = None
    spillover_efficiency: Optional[float] = None
    taper_efficiency: Optional[float] = None
    aperture_efficiency: Optional[float] = None
    directivity_dbi: Optional[float] = None
    feed_q: Optional[float] = None
    focal_distance_mm: Optional[float] = None
    gain_sweep: Optional[List[GainSweepEntry]] = None
    modes: Optional[List[ModeDocument]] = None
    mode_sweep: Optional[List[ModeSweepEntry]] = None
    lobes_deg: Optional[List[float]] = None
