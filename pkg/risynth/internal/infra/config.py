"""
Configuration Management for risynth

Settings are externalized and validated with pydantic-settings. Each section
reads its own environment prefix, and the composed ``Settings`` object is
loaded once per process.

Examples:
    RISYNTH_MAX_THREADS=4           caps the angle-evaluation worker pool
    RISYNTH_PATTERN_GRID_DEG=0.05   refines the default cut grid
    RISYNTH_FEED_F_OVER_D=0.8       changes the default transmitarray feed
    RISYNTH_ENVIRONMENT=production  tags every log line with the environment
"""

import os
from enum import Enum
from functools import lru_cache
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Environment(str, Enum):
    """Application environment enumeration."""
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class ComputeSettings(BaseSettings):
    """Worker pool and chunking of the far-field kernel."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_", extra="ignore")

    max_threads: int = Field(default_factory=lambda: min(8, os.cpu_count() or 1), description="Worker threads for angle evaluation")
    chunk_size: int = Field(256, description="Angles per evaluation chunk (fixed, independent of threads)")

    @field_validator("max_threads", "chunk_size")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v


class PatternSettings(BaseSettings):
    """Default far-field sampling."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_PATTERN_", extra="ignore")

    grid_deg: float = Field(0.1, gt=0, description="Cut grid resolution in degrees")
    cut_phi_deg: Optional[float] = Field(None, description="Azimuth of the reported cut (unset: target azimuth)")
    theta_span_deg: float = Field(90.0, gt=0, le=90, description="Half-span of the cut")
    element_q: float = Field(0.5, ge=0, description="Element pattern exponent (cos^q field)")
    sphere_theta_step_deg: float = Field(0.5, gt=0, description="Polar step for directivity integration")
    sphere_phi_step_deg: float = Field(1.0, gt=0, description="Azimuth step for directivity integration")


class SynthesisSettings(BaseSettings):
    """1-bit quantization."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_SYNTHESIS_", extra="ignore")

    reference_phase_steps: int = Field(
        16, ge=1, description="Reference phases tried when quantizing a steering profile (1 disables the search)"
    )


class FeedSettings(BaseSettings):
    """Default transmitarray feed."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_FEED_", extra="ignore")

    f_over_d: float = Field(0.7, gt=0, description="Focal distance over aperture size")
    edge_taper_db: float = Field(-10.0, le=0, description="Illumination at the aperture edge")


class SwitchSettings(BaseSettings):
    """Switch figure-of-merit defaults."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_SWITCH_", extra="ignore")

    z0: float = Field(50.0, gt=0, description="Reference impedance in ohms")


class GratingSettings(BaseSettings):
    """Grating mode classification."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_GRATING_", extra="ignore")

    grazing_tolerance: float = Field(1e-3, ge=0, lt=1, description="Margin on |sin(theta_n)| below 1 for a propagating order")
    lobe_threshold_db: float = Field(-6.0, lt=0, description="Lobes reported within this level of the peak")


class OutputSettings(BaseSettings):
    """Artifact formatting."""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_OUTPUT_", extra="ignore")

    significant_digits: int = Field(9, ge=3, le=17, description="Significant digits of every written float")


class Settings(BaseSettings):
    """
    Main application settings combining all configuration sections.
    """

    model_config = SettingsConfigDict(
        env_prefix="RISYNTH_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    app_name: str = Field("risynth", description="Application name")
    app_version: str = Field("0.1.0", description="Application version")
    environment: Environment = Field(Environment.DEVELOPMENT, description="Application environment")

    compute: ComputeSettings = Field(default_factory=ComputeSettings)
    pattern: PatternSettings = Field(default_factory=PatternSettings)
    synthesis: SynthesisSettings = Field(default_factory=SynthesisSettings)
    feed: FeedSettings = Field(default_factory=FeedSettings)
    switch: SwitchSettings = Field(default_factory=SwitchSettings)
    grating: GratingSettings = Field(default_factory=GratingSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("environment", mode="before")
    @classmethod
    def validate_environment(cls, v):
        if isinstance(v, str):
            return Environment(v.lower())
        return v

    def with_threads(self, threads: Optional[int]) -> "Settings":
        """Copy with the worker count overridden (``--threads`` flag)."""
        if threads is None:
            return self
        compute = ComputeSettings(max_threads=threads, chunk_size=self.compute.chunk_size)
        return self.model_copy(update={"compute": compute})


@lru_cache()
def get_settings() -> Settings:
    """
    Get application settings with caching.

    Settings are read once per process; they do not change during a run.
    """
    return Settings()


def get_test_settings() -> Settings:
    """Deterministic settings for tests (two threads, shipped defaults)."""
    return Settings(
        environment=Environment.TESTING,
        compute=ComputeSettings(max_threads=2, chunk_size=256),
        pattern=PatternSettings(),
        synthesis=SynthesisSettings(),
        feed=FeedSettings(),
        switch=SwitchSettings(),
        grating=GratingSettings(),
        output=OutputSettings(),
    )
