"""
Core Domain Entities for risynth

Value objects shared by every module: frequencies, observation directions,
complex scattering coefficients and planar array layouts.

Conventions:
- Internal units are strictly SI (Hz, m, rad). GHz, mm and degrees appear
  only at the I/O boundary (CLI, CSV, scenario files).
- Phases are canonicalized to (-pi, pi].
- All value objects are immutable and safe to share between threads.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np
import scipy.constants

from .errors import DomainError

SPEED_OF_LIGHT = scipy.constants.c  # 299 792 458 m/s

GHZ = 1e9
MM = 1e-3

ArrayLike = Union[float, np.ndarray]


def wrap_phase(phase: ArrayLike) -> ArrayLike:
    """Canonicalize phase(s) in radians to (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2.0 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


# Value Objects (immutable, no identity)
@dataclass(frozen=True)
class Frequency:
    """Positive frequency in hertz"""
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value <= 0:
            raise DomainError(f"Frequency must be positive, got {self.value!r} Hz")

    @classmethod
    def from_ghz(cls, ghz: float) -> "Frequency":
        return cls(ghz * GHZ)

    @property
    def ghz(self) -> float:
        return self.value / GHZ

    @property
    def wavelength(self) -> float:
        """Free-space wavelength in meters"""
        return SPEED_OF_LIGHT / self.value

    @property
    def wavenumber(self) -> float:
        """Free-space wavenumber k0 in rad/m"""
        return 2.0 * math.pi / self.wavelength

    @property
    def angular(self) -> float:
        return 2.0 * math.pi * self.value


def wavelength(f: Frequency) -> float:
    """Free-space wavelength c/f in meters."""
    if not isinstance(f, Frequency):
        f = Frequency(float(f))
    return SPEED_OF_LIGHT / f.value


@dataclass(frozen=True)
class Direction:
    """Observation or steering direction on the unit sphere.

    theta is the polar angle from broadside (0 <= theta <= pi) and phi the
    azimuth of the cut plane.
    """
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise DomainError(f"theta must lie in [0, pi], got {self.theta!r}")
        u, v = self.u, self.v
        if u * u + v * v > 1.0 + 1e-12:
            raise DomainError("Direction cosines violate u^2 + v^2 <= 1")

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "Direction":
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    @classmethod
    def in_cut(cls, theta_signed: float, phi_cut: float = 0.0) -> "Direction":
        """Direction for a signed polar angle inside the cut plane phi_cut."""
        if theta_signed < 0:
            return cls(-theta_signed, phi_cut + math.pi)
        return cls(theta_signed, phi_cut)

    @classmethod
    def from_uv(cls, u: float, v: float) -> "Direction":
        rho2 = u * u + v * v
        if rho2 > 1.0:
            raise DomainError(f"u^2 + v^2 = {rho2:.6g} exceeds 1")
        return cls(math.asin(math.sqrt(rho2)), math.atan2(v, u))

    @classmethod
    def broadside(cls) -> "Direction":
        return cls(0.0, 0.0)

    @property
    def u(self) -> float:
        return math.sin(self.theta) * math.cos(self.phi)

    @property
    def v(self) -> float:
        return math.sin(self.theta) * math.sin(self.phi)

    def signed_theta_in_cut(self, phi_cut: float = 0.0) -> float:
        """Signed polar angle as seen in the cut plane phi_cut."""
        if math.cos(self.phi - phi_cut) < -1e-12:
            return -self.theta
        return self.theta


@dataclass(frozen=True)
class ComplexCoefficient:
    """Reflection/transmission coefficient (or complex impedance) in polar form"""
    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.magnitude) or self.magnitude < 0:
            raise DomainError(f"Magnitude must be a finite non-negative number, got {self.magnitude!r}")
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexCoefficient":
        return cls(abs(value), math.atan2(value.imag, value.real))

    @classmethod
    def from_db_deg(cls, mag_db: float, phase_deg: float) -> "ComplexCoefficient":
        return cls(10.0 ** (mag_db / 20.0), math.radians(phase_deg))

    def to_complex(self) -> complex:
        return complex(self.magnitude * math.cos(self.phase), self.magnitude * math.sin(self.phase))

    @property
    def mag_db(self) -> float:
        if self.magnitude == 0:
            return -math.inf
        return 20.0 * math.log10(self.magnitude)

    @property
    def phase_deg(self) -> float:
        return math.degrees(self.phase)


@dataclass(frozen=True)
class ArrayLayout:
    """Regular planar grid of elements centered on the origin.

    Elements are ordered row-major: flat index i = iy * nx + ix.
    """
    nx: int
    ny: int
    pitch_x: float
    pitch_y: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise DomainError(f"Element counts must be >= 1, got {self.nx}x{self.ny}")
        if self.pitch_x <= 0 or self.pitch_y <= 0:
            raise DomainError("Pitch must be positive")

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def extent(self) -> Tuple[float, float]:
        """Aperture extent (nx * pitch_x, ny * pitch_y) in meters"""
        return self.nx * self.pitch_x, self.ny * self.pitch_y

    @property
    def aperture_area(self) -> float:
        ex, ey = self.extent
        return ex * ey

    @property
    def element_area(self) -> float:
        return self.pitch_x * self.pitch_y

    @property
    def max_side(self) -> float:
        return max(self.extent)

    @cached_property
    def _grid(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = (np.arange(self.nx) - (self.nx - 1) / 2.0) * self.pitch_x
        ys = (np.arange(self.ny) - (self.ny - 1) / 2.0) * self.pitch_y
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        x, y = gx.ravel(), gy.ravel()
        x.setflags(write=False)
        y.setflags(write=False)
        return x, y

    @property
    def x(self) -> np.ndarray:
        return self._grid[0]

    @property
    def y(self) -> np.ndarray:
        return self._grid[1]

    @cached_property
    def indices(self) -> Tuple[np.ndarray, np.ndarray]:
        """(ix, iy) index arrays in element order"""
        flat = np.arange(self.size)
        return flat % self.nx, flat // self.nx

    def pitch_in_wavelengths(self, f: Frequency) -> Tuple[float, float]:
        lam = f.wavelength
        return self.pitch_x / lam, self.pitch_y / lam

    def grating_lobe_capable(self, f: Frequency) -> bool:
        """True when either pitch exceeds half a wavelength"""
        px, py = self.pitch_in_wavelengths(f)
        return max(px, py) > 0.5


def make_grid_layout(nx: int, ny: int, pitch: float, pitch_y: Optional[float] = None) -> ArrayLayout:
    """Centered nx-by-ny grid; x_i = (i - (nx - 1)/2) * pitch."""
    if nx < 1 or ny < 1:
        raise DomainError(f"Element counts must be >= 1, got {nx}x{ny}")
    if pitch <= 0 or (pitch_y is not None and pitch_y <= 0):
        raise DomainError("Pitch must be positive")
    return ArrayLayout(int(nx), int(ny), float(pitch), float(pitch if pitch_y is None else pitch_y))
