"""
Phase Synthesis and Quantization

Ideal continuous phase profiles for R-RIS beam steering and T-RIS
collimation, and their nearest-state quantization onto a unit-cell table.
Each element is treated independently (local periodicity), so every
computation here is a per-element map over the layout.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .entities import ArrayLayout, Direction, Frequency, wrap_phase
from .errors import DomainError, UnknownStateError
from .unit_cell import UnitCellStateTable

TIE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    """Ideal phase per element, canonicalized to (-pi, pi]"""
    layout: ArrayLayout
    ideal_phase: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.ideal_phase, dtype=float)
        if phases.shape != (self.layout.size,):
            raise DomainError(f"Expected {self.layout.size} phases, got shape {phases.shape}")
        phases = np.asarray(wrap_phase(phases), dtype=float)
        phases.setflags(write=False)
        object.__setattr__(self, "ideal_phase", phases)

    def shifted(self, delta: float) -> "PhaseProfile":
        return PhaseProfile(self.layout, self.ideal_phase + delta)


@dataclass(frozen=True, eq=False)
class StateMap:
    """Quantized state per element with the residual phase error it leaves"""
    layout: ArrayLayout
    states: Tuple[str, ...]
    residual_error: np.ndarray
    ideal_phase: np.ndarray

    def __post_init__(self):
        n = self.layout.size
        if len(self.states) != n:
            raise DomainError(f"Expected {n} states, got {len(self.states)}")
        for name in ("residual_error", "ideal_phase"):
            values = np.asarray(getattr(self, name), dtype=float).copy()
            if values.shape != (n,):
                raise DomainError(f"{name} must hold one value per element")
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        object.__setattr__(self, "states", tuple(self.states))

    def check_bound(self, table: UnitCellStateTable) -> None:
        """Raise UnknownStateError unless every state is defined in ``table``."""
        for state in sorted(set(self.states)):
            if state not in table.coefficients:
                raise UnknownStateError(state, table.states)

    def coefficients(self, table: UnitCellStateTable, f: Frequency) -> np.ndarray:
        """Complex coefficient per element at ``f``."""
        self.check_bound(table)
        lookup = {state: table.value_at(state, f.value) for state in sorted(set(self.states))}
        return np.array([lookup[state] for state in self.states], dtype=complex)

    def state_grid(self) -> np.ndarray:
        """States reshaped to (ny, nx) for display"""
        return np.array(self.states, dtype=object).reshape(self.layout.ny, self.layout.nx)


@dataclass(frozen=True)
class FeedSpec:
    """Feed horn of a transmitarray.

    The feed sits at ``position`` (x, y, z) with z the focal distance F on the
    transmit side and radiates a cos^(2*q_f) power pattern normalized to unit
    total power, its axis parallel to the array normal.
    """
    position: Tuple[float, float, float]
    q_f: float = 0.0

    def __post_init__(self):
        if len(self.position) != 3:
            raise DomainError("Feed position must be (x, y, z)")
        if self.position[2] <= 0:
            raise DomainError("Feed focal distance F must be positive (feed in the array plane)")
        if self.q_f < 0:
            raise DomainError("Feed pattern exponent q_f must be non-negative")
        object.__setattr__(self, "position", tuple(float(p) for p in self.position))

    @property
    def focal_distance(self) -> float:
        return self.position[2]

    @classmethod
    def for_aperture(
        cls,
        layout: ArrayLayout,
        f_over_d: float = 0.7,
        edge_taper_db: float = -10.0,
        offset: Tuple[float, float] = (0.0, 0.0),
    ) -> "FeedSpec":
        """Feed with F = f_over_d * D and q_f giving ``edge_taper_db`` at the aperture edge.

        The edge illumination includes spherical spreading, so it scales as
        cos^(2*q_f + 2) of the edge half-angle.
        """
        if f_over_d <= 0:
            raise DomainError("f_over_d must be positive")
        if edge_taper_db > 0:
            raise DomainError("edge_taper_db must be <= 0")
        focal = f_over_d * layout.max_side
        cos_edge = focal / math.hypot(focal, layout.max_side / 2.0)
        q_f = max(0.0, edge_taper_db / (20.0 * math.log10(cos_edge)) - 1.0)
        return cls((offset[0], offset[1], focal), q_f)

    def edge_taper_db(self, layout: ArrayLayout) -> float:
        """Illumination at the aperture edge midpoint relative to the center, in dB"""
        focal = self.focal_distance
        cos_edge = focal / math.hypot(focal, layout.max_side / 2.0)
        return (2.0 * self.q_f + 2.0) * 10.0 * math.log10(cos_edge)

    def distances(self, layout: ArrayLayout) -> np.ndarray:
        """Feed-to-element distances r_i"""
        fx, fy, fz = self.position
        return np.sqrt((layout.x - fx) ** 2 + (layout.y - fy) ** 2 + fz ** 2)


def steering_profile(
    layout: ArrayLayout, f: Frequency, target: Direction, incidence: Optional[Direction] = None
) -> PhaseProfile:
    """Linear phase gradient steering a plane wave to ``target``.

    Normal incidence unless ``incidence`` is given; an oblique wave adds its
    own gradient, which the profile cancels.
    """
    k0 = f.wavenumber
    u_inc, v_inc = (0.0, 0.0) if incidence is None else (incidence.u, incidence.v)
    phases = -k0 * (layout.x * (target.u + u_inc) + layout.y * (target.v + v_inc))
    return PhaseProfile(layout, phases)


def collimation_profile(
    layout: ArrayLayout,
    f: Frequency,
    feed: FeedSpec,
    target: Direction,
    reference_phase: float = 0.0,
) -> PhaseProfile:
    """Cell phases that cancel the feed's spherical wavefront and steer to ``target``.

    phase_i = k0 * (r_i - r_0) - k0 * (x_i*u0 + y_i*v0) + reference_phase,
    where r_0 is the feed distance to the array center.
    """
    if feed.focal_distance <= 0:
        raise DomainError("Feed focal distance must be positive")
    k0 = f.wavenumber
    fx, fy, fz = feed.position
    r = feed.distances(layout)
    r0 = math.sqrt(fx * fx + fy * fy + fz * fz)
    phases = k0 * (r - r0) - k0 * (layout.x * target.u + layout.y * target.v) + reference_phase
    return PhaseProfile(layout, phases)


def state_phases(table: UnitCellStateTable, f: Frequency) -> Tuple[Tuple[str, ...], np.ndarray]:
    """States in lexicographic order and their coefficient phases at ``f``"""
    names = tuple(sorted(table.states))
    values = np.array([table.value_at(name, f.value) for name in names], dtype=complex)
    return names, np.angle(values)


def quantize(profile: PhaseProfile, table: UnitCellStateTable, f: Frequency) -> StateMap:
    """Nearest-phase state per element.

    Ties (equal wrapped distance within 1e-12 rad) go to the lexicographically
    smallest state name.
    """
    names, phases = state_phases(table, f)
    ideal = profile.ideal_phase
    distance = np.abs(wrap_phase(phases[None, :] - ideal[:, None]))
    nearest = distance <= distance.min(axis=1, keepdims=True) + TIE_TOLERANCE
    choice = np.argmax(nearest, axis=1)
    residual = wrap_phase(ideal - phases[choice])
    return StateMap(
        layout=profile.layout,
        states=tuple(names[k] for k in choice),
        residual_error=np.asarray(residual, dtype=float).reshape(-1),
        ideal_phase=ideal,
    )


def realized_profile(statemap: StateMap, table: UnitCellStateTable, f: Frequency) -> PhaseProfile:
    """Phase profile actually realized by a state map."""
    return PhaseProfile(statemap.layout, np.angle(statemap.coefficients(table, f)))


def max_residual_bound(table: UnitCellStateTable, f: Frequency) -> float:
    """Half the largest angular gap between the table's state phases at ``f``."""
    _, phases = state_phases(table, f)
    ordered = np.sort(np.mod(phases, 2.0 * np.pi))
    gaps = np.diff(np.concatenate([ordered, [ordered[0] + 2.0 * np.pi]]))
    return float(gaps.max() / 2.0)


def single_state_map(layout: ArrayLayout, state: str, ideal_phase: Optional[np.ndarray] = None) -> StateMap:
    """Every element in the same state (uniform phase)"""
    ideal = np.zeros(layout.size) if ideal_phase is None else ideal_phase
    return StateMap(layout, (state,) * layout.size, np.zeros(layout.size), ideal)
