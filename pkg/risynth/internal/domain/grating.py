"""
Strip-Grating Beam Splitter

Floquet-mode bookkeeping for a reconfigurable strip grating whose period is
set by which microfluidic channels are filled with liquid metal, and the
finite-aperture pattern of the resulting strips.

Mode amplitudes are not modelled: patterns predict lobe positions and counts.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .entities import Frequency
from .errors import DomainError
from .farfield import (
    AngleMapper,
    ElementModel,
    FarFieldPattern,
    Normalization,
    array_pattern,
    cut_angles,
)

DEFAULT_GRAZING_TOLERANCE = 1e-3


def _minimal_repeat(pattern: Tuple[bool, ...]) -> int:
    n = len(pattern)
    for d in range(1, n + 1):
        if n % d == 0 and all(pattern[i] == pattern[i % d] for i in range(n)):
            return d
    return n


@dataclass(frozen=True)
class GratingConfig:
    """Channel spacing, which channels hold liquid metal (repeated), incidence and frequency"""
    channel_spacing: float
    fill_pattern: Tuple[bool, ...]
    incidence: float
    frequency: Frequency

    def __post_init__(self):
        if self.channel_spacing <= 0:
            raise DomainError(f"Channel spacing must be positive, got {self.channel_spacing!r}")
        pattern = tuple(bool(v) for v in self.fill_pattern)
        if not pattern:
            raise DomainError("Fill pattern must list at least one channel")
        if not any(pattern):
            raise DomainError("Fill pattern has no filled channel; the grating has no period")
        if not (-math.pi / 2 < self.incidence < math.pi / 2):
            raise DomainError("Incidence angle must lie in (-90, 90) degrees")
        object.__setattr__(self, "fill_pattern", pattern)

    @classmethod
    def with_period(cls, period: float, frequency: Frequency, incidence: float = 0.0) -> "GratingConfig":
        """Every channel filled, channels ``period`` apart"""
        return cls(period, (True,), incidence, frequency)

    @property
    def repeat_length(self) -> int:
        return _minimal_repeat(self.fill_pattern)

    @property
    def effective_period(self) -> float:
        return self.channel_spacing * self.repeat_length

    @property
    def period(self) -> float:
        return self.effective_period


@dataclass(frozen=True)
class FloquetMode:
    """Diffraction order n with its direction sine and angle"""
    order: int
    sin_theta: float
    propagating: bool

    @property
    def theta(self) -> float:
        return math.asin(max(-1.0, min(1.0, self.sin_theta)))

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    def to_dict(self) -> dict:
        return {"n": self.order, "theta_deg": self.theta_deg, "propagating": self.propagating}


def propagating_modes(
    cfg: GratingConfig, grazing_tolerance: float = DEFAULT_GRAZING_TOLERANCE
) -> List[FloquetMode]:
    """Every order n with |sin(theta_i) + n*lambda/P| <= 1, sorted by n.

    An order is flagged propagating only when it stays clear of grazing by
    ``grazing_tolerance``; orders within the tolerance of grazing (default
    1e-3) are still listed, flagged non-propagating.
    """
    if grazing_tolerance < 0:
        raise DomainError("grazing_tolerance must be non-negative")
    ratio = cfg.frequency.wavelength / cfg.effective_period
    s_inc = math.sin(cfg.incidence)
    n_lo = math.ceil((-1.0 - s_inc) / ratio)
    n_hi = math.floor((1.0 - s_inc) / ratio)
    modes = []
    for n in range(n_lo, n_hi + 1):
        s_n = s_inc + n * ratio
        if abs(s_n) > 1.0:
            continue
        modes.append(FloquetMode(order=n, sin_theta=s_n, propagating=abs(s_n) < 1.0 - grazing_tolerance))
    return modes


def propagating_count(cfg: GratingConfig, grazing_tolerance: float = DEFAULT_GRAZING_TOLERANCE) -> int:
    return sum(1 for m in propagating_modes(cfg, grazing_tolerance) if m.propagating)


def sweep_modes(
    cfg: GratingConfig,
    frequencies: Sequence[Frequency],
    grazing_tolerance: float = DEFAULT_GRAZING_TOLERANCE,
) -> List[Tuple[Frequency, List[FloquetMode]]]:
    """Modes of the same grating at each frequency"""
    result = []
    for f in frequencies:
        at_f = GratingConfig(cfg.channel_spacing, cfg.fill_pattern, cfg.incidence, f)
        result.append((f, propagating_modes(at_f, grazing_tolerance)))
    return result


def strip_positions(cfg: GratingConfig, aperture_width: float) -> np.ndarray:
    """x positions of the filled channels across a centered aperture"""
    if aperture_width < cfg.effective_period:
        raise DomainError(
            f"Aperture {aperture_width * 1e3:.6g} mm is narrower than one period "
            f"({cfg.effective_period * 1e3:.6g} mm)"
        )
    n_channels = int(math.floor(aperture_width / cfg.channel_spacing + 1e-9))
    centers = (np.arange(n_channels) - (n_channels - 1) / 2.0) * cfg.channel_spacing
    filled = np.array([cfg.fill_pattern[k % len(cfg.fill_pattern)] for k in range(n_channels)])
    return centers[filled]


def splitter_pattern(
    cfg: GratingConfig,
    aperture_width: float,
    element: Optional[ElementModel] = None,
    grid_deg: float = 0.1,
    mapper: Optional[AngleMapper] = None,
    span_deg: float = 90.0,
) -> FarFieldPattern:
    """Normalized cut (perpendicular to the strips) of the filled strips under plane-wave incidence.

    Each strip is a unit-reflection element; the incident wave sets a linear
    phase -k0*x*sin(theta_i) across the strips, so order n leaves at
    sin(theta_i) + n*lambda/P as reported by :func:`propagating_modes`.
    """
    element = element or ElementModel()
    f = cfg.frequency
    x = strip_positions(cfg, aperture_width)
    weights = np.exp(-1j * f.wavenumber * x * math.sin(cfg.incidence))
    theta = cut_angles(grid_deg, span_deg)
    values = array_pattern(x, np.zeros_like(x), weights, f, theta, np.zeros_like(theta), element, mapper)
    peak = np.max(np.abs(values))
    if peak > 0:
        values = values / peak
    return FarFieldPattern(theta, np.array([0.0]), values, Normalization.PEAK_ZERO_DB, f)


def period_for_split(f: Frequency, angle: float, incidence: float = 0.0) -> float:
    """Period whose first order leaves at ``angle``: P = lambda / (sin(angle) - sin(theta_i))."""
    if not (-math.pi / 2 <= angle <= math.pi / 2):
        raise DomainError("Split angle must lie within [-90, 90] degrees")
    denom = math.sin(angle) - math.sin(incidence)
    if abs(denom) < 1e-15:
        raise DomainError("Split angle equals the specular direction; the period would be infinite")
    return f.wavelength / abs(denom)
