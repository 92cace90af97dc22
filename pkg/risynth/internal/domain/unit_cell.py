"""
Unit-Cell State Tables

Per-state frequency response of a RIS unit-cell (reflection for R-RIS,
transmission for T-RIS) together with the scalar metrics reported for
unit-cell designs: insertion loss, phase difference between states and
fractional bandwidth under a loss threshold.

Under the local periodicity principle each element of an array is assigned
the response of its infinite-periodic unit-cell, so these tables are all the
array models need to know about the cell.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import interp1d
from scipy.optimize import brentq

from .entities import ComplexCoefficient, Frequency, wrap_phase
from .errors import (
    DomainError,
    FrequencyRangeError,
    MismatchedGridError,
    NonMonotoneFrequencyError,
    PassivityError,
    StateTableTooSmallError,
    UnknownStateError,
)

PASSIVITY_TOLERANCE = 1e-9
RANGE_TOLERANCE = 1e-12


class UnitCellKind(Enum):
    """Whether the table holds reflection or transmission coefficients"""
    REFLECTIVE = "reflective"
    TRANSMISSIVE = "transmissive"


@dataclass(frozen=True)
class SubstrateMetadata:
    """Informational substrate data carried along with a table"""
    eps_r: Optional[float] = None
    tan_delta: Optional[float] = None
    thickness_m: Optional[float] = None
    source: str = ""


@dataclass(frozen=True, eq=False)
class UnitCellStateTable:
    """Complex coefficient per state sampled on a shared frequency grid"""
    kind: UnitCellKind
    states: Tuple[str, ...]
    frequencies: np.ndarray
    coefficients: Mapping[str, np.ndarray]
    metadata: SubstrateMetadata = field(default_factory=SubstrateMetadata)
    active: bool = False

    def __post_init__(self):
        if len(self.states) < 2:
            raise StateTableTooSmallError(f"A state table needs at least 2 states, got {len(self.states)}")
        if len(set(self.states)) != len(self.states):
            raise MismatchedGridError("Duplicate state names")
        freqs = np.asarray(self.frequencies, dtype=float)
        if freqs.ndim != 1 or freqs.size < 1:
            raise NonMonotoneFrequencyError("Frequency grid must be a non-empty 1-D array")
        if np.any(freqs <= 0):
            raise NonMonotoneFrequencyError("Frequencies must be positive")
        if np.any(np.diff(freqs) <= 0):
            raise NonMonotoneFrequencyError("Frequencies must be strictly increasing")
        freqs = freqs.copy()
        freqs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)

        coefficients: Dict[str, np.ndarray] = {}
        for state in self.states:
            if state not in self.coefficients:
                raise MismatchedGridError(f"State '{state}' has no samples")
            values = np.asarray(self.coefficients[state], dtype=complex).copy()
            if values.shape != freqs.shape:
                raise MismatchedGridError(
                    f"State '{state}' has {values.size} samples, grid has {freqs.size}"
                )
            if not self.active and np.any(np.abs(values) > 1.0 + PASSIVITY_TOLERANCE):
                worst = float(np.max(np.abs(values)))
                raise PassivityError(
                    f"State '{state}' has |coefficient| = {worst:.6g} > 1 in a passive table "
                    "(add '#active=true' for gain cells)"
                )
            values.setflags(write=False)
            coefficients[state] = values
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_samples(
        cls,
        kind: UnitCellKind,
        samples: Mapping[str, Sequence[Tuple[Frequency, ComplexCoefficient]]],
        metadata: Optional[SubstrateMetadata] = None,
        active: bool = False,
    ) -> "UnitCellStateTable":
        """Build a table from per-state (frequency, coefficient) samples.

        Every state must be sampled on the same strictly increasing grid.
        """
        states = tuple(samples.keys())
        if len(states) < 2:
            raise StateTableTooSmallError(f"A state table needs at least 2 states, got {len(states)}")
        grid: Optional[np.ndarray] = None
        coefficients: Dict[str, np.ndarray] = {}
        for state in states:
            freqs = np.array([f.value for f, _ in samples[state]], dtype=float)
            if np.any(np.diff(freqs) <= 0):
                raise NonMonotoneFrequencyError(f"Frequencies of state '{state}' are not strictly increasing")
            if grid is None:
                grid = freqs
            elif freqs.shape != grid.shape or not np.array_equal(freqs, grid):
                raise MismatchedGridError(f"State '{state}' is not sampled on the same grid as '{states[0]}'")
            coefficients[state] = np.array([c.to_complex() for _, c in samples[state]], dtype=complex)
        return cls(
            kind=kind,
            states=states,
            frequencies=grid,
            coefficients=coefficients,
            metadata=metadata or SubstrateMetadata(),
            active=active,
        )

    @property
    def f_min(self) -> float:
        return float(self.frequencies[0])

    @property
    def f_max(self) -> float:
        return float(self.frequencies[-1])

    def contains(self, f: Frequency) -> bool:
        tol = RANGE_TOLERANCE * self.f_max
        return self.f_min - tol <= f.value <= self.f_max + tol

    def require_state(self, state: str) -> None:
        if state not in self.coefficients:
            raise UnknownStateError(state, self.states)

    @cached_property
    def _interpolators(self) -> Dict[str, Tuple[interp1d, interp1d]]:
        if self.frequencies.size < 2:
            return {}
        return {
            state: (
                interp1d(self.frequencies, values.real, kind="linear", assume_sorted=True),
                interp1d(self.frequencies, values.imag, kind="linear", assume_sorted=True),
            )
            for state, values in self.coefficients.items()
        }

    def value_at(self, state: str, f_hz: float) -> complex:
        """Rectangular-form interpolation; exact at stored samples."""
        self.require_state(state)
        tol = RANGE_TOLERANCE * self.f_max
        if not (self.f_min - tol <= f_hz <= self.f_max + tol):
            raise FrequencyRangeError(
                f"{f_hz / 1e9:.6g} GHz is outside the table range "
                f"[{self.f_min / 1e9:.6g}, {self.f_max / 1e9:.6g}] GHz"
            )
        values = self.coefficients[state]
        idx = int(np.searchsorted(self.frequencies, f_hz))
        for k in (idx - 1, idx):
            if 0 <= k < self.frequencies.size and abs(self.frequencies[k] - f_hz) <= tol:
                return complex(values[k])
        re, im = self._interpolators[state]
        return complex(float(re(f_hz)), float(im(f_hz)))


@dataclass(frozen=True)
class IdealOneBitCell:
    """Lossy-or-lossless 1-bit cell with exactly 0/180 degree states"""
    kind: UnitCellKind = UnitCellKind.REFLECTIVE
    loss_db: Tuple[float, float] = (0.0, 0.0)
    state_names: Tuple[str, str] = ("000", "180")

    def __post_init__(self):
        if len(self.loss_db) != 2 or any(loss < 0 for loss in self.loss_db):
            raise DomainError("loss_db must hold two non-negative values")
        if len(set(self.state_names)) != 2:
            raise DomainError("state_names must hold two distinct names")

    @property
    def phase_pair(self) -> Tuple[float, float]:
        return 0.0, math.pi

    def to_state_table(self, f_lo: Frequency, f_hi: Frequency) -> UnitCellStateTable:
        """Frequency-flat table spanning [f_lo, f_hi] (a single point if equal)."""
        if f_hi.value < f_lo.value:
            raise DomainError("f_hi must not be below f_lo")
        grid = [f_lo] if f_hi.value == f_lo.value else [f_lo, f_hi]
        samples = {
            name: [(f, ComplexCoefficient.from_db_deg(-loss, math.degrees(phase))) for f in grid]
            for name, loss, phase in zip(self.state_names, self.loss_db, self.phase_pair)
        }
        return UnitCellStateTable.from_samples(self.kind, samples, SubstrateMetadata(source="ideal 1-bit cell"))


def coefficient_at(table: UnitCellStateTable, state: str, f: Frequency) -> ComplexCoefficient:
    """Coefficient of ``state`` at ``f`` (linear interpolation of real and imaginary parts)."""
    return ComplexCoefficient.from_complex(table.value_at(state, f.value))


def insertion_loss(table: UnitCellStateTable, state: str, f: Frequency) -> float:
    """-20*log10|coefficient| in dB."""
    magnitude = abs(table.value_at(state, f.value))
    if magnitude == 0:
        return math.inf
    return -20.0 * math.log10(magnitude)


def phase_difference(table: UnitCellStateTable, state_a: str, state_b: str, f: Frequency) -> float:
    """Wrapped phase(state_a) - phase(state_b) in degrees, in (-180, 180]."""
    a = table.value_at(state_a, f.value)
    b = table.value_at(state_b, f.value)
    return math.degrees(wrap_phase(math.atan2(a.imag, a.real) - math.atan2(b.imag, b.real)))


def fractional_bandwidth(table: UnitCellStateTable, state: str, threshold_db: float, f_center: Frequency) -> float:
    """Percent bandwidth of the contiguous band around f_center with loss < threshold_db.

    Band edges falling between samples are refined with Brent's method on the
    interpolated response. Returns 0 when the loss at f_center already meets
    or exceeds the threshold.
    """
    table.require_state(state)
    fc = f_center.value
    if not table.contains(f_center):
        raise FrequencyRangeError(f"Center frequency {f_center.ghz:.6g} GHz is outside the table range")

    def excess(f_hz: float) -> float:
        return insertion_loss(table, state, Frequency(f_hz)) - threshold_db

    if excess(fc) >= 0:
        return 0.0

    def band_edge(candidates: np.ndarray, limit: float) -> float:
        inside = fc
        for fk in candidates:
            if excess(float(fk)) >= 0:
                return float(brentq(excess, min(inside, fk), max(inside, fk), xtol=1.0))
            inside = float(fk)
        return limit

    grid = table.frequencies
    f_hi = band_edge(grid[grid > fc], table.f_max)
    f_lo = band_edge(grid[grid < fc][::-1], table.f_min)
    return 100.0 * (f_hi - f_lo) / fc
