"""
Far-Field Patterns

Scalar array-factor model of RIS far fields:

- R-RIS scattered patterns (normalized RCS) under plane-wave incidence
- 1-bit reference-phase selection that keeps the steered lobe above its image
- T-RIS realized gain from a feed-illuminated aperture (spillover counted as loss),
  at the design frequency or swept with the state map held fixed
- pattern metrics (peak, sidelobe level, beamwidth, pointing error)
- directivity by trapezoidal integration over the sphere
- free-space path loss and a Friis link budget

Every angle is evaluated independently, in fixed-size chunks, so a threaded
AngleMapper gives bit-identical results to the serial one.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .entities import ArrayLayout, Direction, Frequency
from .errors import DomainError, KindMismatchError
from .synthesis import FeedSpec, PhaseProfile, StateMap, quantize
from .unit_cell import UnitCellKind, UnitCellStateTable

CHUNK_SIZE = 256
DB_FLOOR = -300.0
PEAK_TIE_DB = 1e-9
REFERENCE_PHASE_STEPS = 16
REFERENCE_TIE = 1e-9


class Normalization(Enum):
    """How pattern values are scaled"""
    PEAK_ZERO_DB = "PeakZeroDb"
    ABSOLUTE_GAIN_DBI = "AbsoluteGainDbi"


class ExcitationSource(Enum):
    """What drives the elements"""
    PLANE_WAVE = "plane_wave"
    FEED = "feed"


@dataclass(frozen=True)
class ElementModel:
    """Element power pattern cos^(2*q_e)(theta) and its excitation source"""
    q_e: float = 0.5
    source: ExcitationSource = ExcitationSource.PLANE_WAVE

    def __post_init__(self):
        if self.q_e < 0:
            raise DomainError("Element pattern exponent q_e must be non-negative")

    def field_factor(self, theta: np.ndarray) -> np.ndarray:
        """cos^q_e(theta) amplitude, zero behind the aperture"""
        cos_t = np.clip(np.cos(theta), 0.0, None)
        return np.power(cos_t, self.q_e)


@dataclass(frozen=True, eq=False)
class FarFieldPattern:
    """Sampled complex far field.

    Cut patterns hold signed polar angles in ``theta`` and a single azimuth in
    ``phi``; sphere patterns hold theta in [0, pi] and phi in [0, 2*pi] with
    ``field`` shaped (n_theta, n_phi). For gain patterns |field|^2 is the
    linear gain; for PeakZeroDb patterns the field is divided by its peak.
    """
    theta: np.ndarray
    phi: np.ndarray
    field: np.ndarray
    normalization: Normalization
    frequency: Frequency
    sphere: bool = False

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 1 or theta.size < 1:
            raise DomainError("theta samples must be a non-empty 1-D array")
        if np.any(np.diff(theta) <= 0):
            raise DomainError("Angle samples must be strictly increasing")
        if self.sphere:
            expected = (theta.size, np.asarray(self.phi).size)
        else:
            expected = theta.shape
        if np.asarray(self.field).shape != expected:
            raise DomainError(f"field shape {np.asarray(self.field).shape} does not match angles {expected}")

    @property
    def cut_phi(self) -> float:
        if self.sphere:
            raise DomainError("A full-sphere pattern has no single cut plane")
        return float(np.asarray(self.phi).reshape(-1)[0])

    @property
    def theta_deg(self) -> np.ndarray:
        return np.degrees(self.theta)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.field)

    @property
    def value_db(self) -> np.ndarray:
        mag = self.magnitude
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mag)
        return np.maximum(db, DB_FLOOR)


@dataclass(frozen=True)
class PatternMetrics:
    """Main-beam figures of a cut pattern; all None when no interior peak exists"""
    peak_deg: Optional[float]
    peak_db: Optional[float]
    sll_db: Optional[float]
    hpbw_deg: Optional[float]
    pointing_error_deg: Optional[float]
    defined: bool = True

    def to_dict(self) -> dict:
        return {
            "peak_deg": self.peak_deg,
            "peak_db": self.peak_db,
            "sll_db": self.sll_db,
            "hpbw_deg": self.hpbw_deg,
            "pointing_error_deg": self.pointing_error_deg,
        }


@dataclass(frozen=True)
class TransmitEfficiencies:
    """Illumination bookkeeping of a feed-illuminated aperture"""
    spillover: float
    taper: float

    @property
    def aperture(self) -> float:
        return self.spillover * self.taper


class AngleMapper(Protocol):
    """Evaluates ``fn`` over [0, n) in fixed-size chunks and concatenates the results"""

    def map_chunks(self, fn: Callable[[slice], np.ndarray], n: int) -> np.ndarray:
        ...


class SerialAngleMapper:
    """Chunked evaluation on the calling thread"""

    def __init__(self, chunk_size: int = CHUNK_SIZE):
        self.chunk_size = chunk_size

    def map_chunks(self, fn: Callable[[slice], np.ndarray], n: int) -> np.ndarray:
        parts = [fn(slice(start, min(start + self.chunk_size, n))) for start in range(0, n, self.chunk_size)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def cut_angles(grid_deg: float, span_deg: float = 90.0) -> np.ndarray:
    """Signed polar angles k*grid, k = -n..n, in radians (exactly mirror-symmetric)."""
    if grid_deg <= 0:
        raise DomainError("Angular grid resolution must be positive")
    if not 0 < span_deg <= 90.0:
        raise DomainError(f"Cut half-span must lie in (0, 90] degrees, got {span_deg!r}")
    n = int(math.floor(span_deg / grid_deg + 1e-9))
    return np.radians(np.arange(-n, n + 1) * grid_deg)


def array_pattern(
    x: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    f: Frequency,
    theta: np.ndarray,
    phi: np.ndarray,
    element: ElementModel,
    mapper: Optional[AngleMapper] = None,
) -> np.ndarray:
    """E(theta, phi) = EF(theta) * sum_i w_i exp(j k0 (x_i u + y_i v)).

    ``theta`` and ``phi`` are flat arrays of equal length; theta may be signed.
    Summation order over elements is fixed per angle.
    """
    mapper = mapper or SerialAngleMapper()
    k0 = f.wavenumber
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(weights, dtype=complex)
    theta = np.asarray(theta, dtype=float).reshape(-1)
    phi = np.broadcast_to(np.asarray(phi, dtype=float), theta.shape)
    u = np.sin(theta) * np.cos(phi)
    v = np.sin(theta) * np.sin(phi)
    ef = element.field_factor(np.abs(theta))

    def evaluate(sl: slice) -> np.ndarray:
        phase = k0 * (u[sl, None] * x[None, :] + v[sl, None] * y[None, :])
        return np.sum(w[None, :] * np.exp(1j * phase), axis=1) * ef[sl]

    return mapper.map_chunks(evaluate, theta.size)


def _cut_pattern(
    x: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    f: Frequency,
    element: ElementModel,
    cut_phi: float,
    grid_deg: float,
    normalization: Normalization,
    mapper: Optional[AngleMapper],
    span_deg: float = 90.0,
) -> FarFieldPattern:
    theta = cut_angles(grid_deg, span_deg)
    values = array_pattern(x, y, weights, f, theta, np.full(theta.shape, cut_phi), element, mapper)
    if normalization is Normalization.PEAK_ZERO_DB:
        peak = np.max(np.abs(values))
        if peak > 0:
            values = values / peak
    return FarFieldPattern(theta, np.array([cut_phi]), values, normalization, f)


def plane_wave_excitation(layout: ArrayLayout, f: Frequency, incidence: Direction) -> np.ndarray:
    """Incident phase exp(j k0 (x u_inc + y v_inc)) of a unit plane wave"""
    k0 = f.wavenumber
    return np.exp(1j * k0 * (layout.x * incidence.u + layout.y * incidence.v))


def scattered_pattern(
    layout: ArrayLayout,
    statemap: StateMap,
    table: UnitCellStateTable,
    f: Frequency,
    incidence: Optional[Direction] = None,
    element: Optional[ElementModel] = None,
    cut_phi: float = 0.0,
    grid_deg: float = 0.1,
    mapper: Optional[AngleMapper] = None,
    span_deg: float = 90.0,
) -> FarFieldPattern:
    """Normalized scattered field of a plane-wave illuminated R-RIS in the cut ``cut_phi``."""
    incidence = incidence or Direction.broadside()
    element = element or ElementModel()
    gamma = statemap.coefficients(table, f)
    weights = plane_wave_excitation(layout, f, incidence) * gamma
    return _cut_pattern(
        layout.x, layout.y, weights, f, element, cut_phi, grid_deg, Normalization.PEAK_ZERO_DB, mapper, span_deg
    )


def mirror_direction(target: Direction, incidence: Optional[Direction] = None) -> Optional[Direction]:
    """Image lobe of a 1-bit steering map: u = -u_t - 2*u_inc (likewise v).

    None when the image falls outside visible space.
    """
    incidence = incidence or Direction.broadside()
    u = -target.u - 2.0 * incidence.u
    v = -target.v - 2.0 * incidence.v
    if u * u + v * v > 1.0:
        return None
    return Direction.from_uv(u, v)


def quantize_toward(
    layout: ArrayLayout,
    profile: PhaseProfile,
    table: UnitCellStateTable,
    f: Frequency,
    target: Direction,
    incidence: Optional[Direction] = None,
    element: Optional[ElementModel] = None,
    steps: int = REFERENCE_PHASE_STEPS,
) -> StateMap:
    """Quantize a steering profile at the reference phase that favors ``target``.

    A 1-bit map radiates an image lobe (see :func:`mirror_direction`) about as
    strong as the steered one. States of unequal magnitude, or not 180 degrees
    apart, tip that balance one way or the other depending on the constant
    phase added before quantizing. The profile is quantized at reference
    phases 2*pi*k/steps; among maps whose target level is not below the image
    level the strongest toward ``target`` wins, else the strongest overall.
    Ties keep the smaller k, so ``steps=1`` is plain :func:`quantize`.
    """
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps!r}")
    incidence = incidence or Direction.broadside()
    element = element or ElementModel()
    image = mirror_direction(target, incidence)
    looks = [target] if image is None else [target, image]
    theta = np.array([d.theta for d in looks])
    phi = np.array([d.phi for d in looks])
    excitation = plane_wave_excitation(layout, f, incidence)

    best: Optional[StateMap] = None
    fallback: Optional[StateMap] = None
    best_level = fallback_level = -1.0
    for k in range(steps):
        statemap = quantize(profile.shifted(2.0 * math.pi * k / steps), table, f)
        weights = excitation * statemap.coefficients(table, f)
        levels = np.abs(array_pattern(layout.x, layout.y, weights, f, theta, phi, element))
        toward = float(levels[0])
        if toward > fallback_level * (1.0 + REFERENCE_TIE):
            fallback, fallback_level = statemap, toward
        if levels.size > 1 and toward < levels[1] * (1.0 - REFERENCE_TIE):
            continue
        if toward > best_level * (1.0 + REFERENCE_TIE):
            best, best_level = statemap, toward
    return best if best is not None else fallback


def feed_illumination(layout: ArrayLayout, f: Frequency, feed: FeedSpec, element: ElementModel) -> np.ndarray:
    """b_i = sqrt(P_i * A_e) / lambda * exp(-j k0 r_i).

    P_i is the feed power captured by element i: the cos^(2 q_f) feed pattern
    (unit total power) at the element, the element's cos^(2 q_e) capture
    pattern, its area A_e and 1/r_i^2 spreading.
    """
    r = feed.distances(layout)
    cos_t = feed.focal_distance / r
    intensity = (2.0 * feed.q_f + 1.0) / (2.0 * math.pi) * np.power(cos_t, 2.0 * feed.q_f)
    captured = intensity * layout.element_area * np.power(cos_t, 2.0 * element.q_e) / r ** 2
    amplitude = np.sqrt(captured * layout.element_area) / f.wavelength
    return amplitude * np.exp(-1j * f.wavenumber * r)


def transmit_efficiencies(layout: ArrayLayout, f: Frequency, feed: FeedSpec, element: ElementModel) -> TransmitEfficiencies:
    """Spillover (captured fraction of feed power) and amplitude-taper efficiency"""
    b = np.abs(feed_illumination(layout, f, feed, element))
    captured = b ** 2 * f.wavelength ** 2 / layout.element_area
    spill = float(np.sum(captured))
    taper = float(np.sum(b) ** 2 / (layout.size * np.sum(b ** 2))) if spill > 0 else 0.0
    return TransmitEfficiencies(spillover=spill, taper=taper)


def _require_transmissive(table: UnitCellStateTable) -> None:
    if table.kind is not UnitCellKind.TRANSMISSIVE:
        raise KindMismatchError(f"Transmit gain needs a transmissive table, got {table.kind.value}")


def transmit_weights(
    layout: ArrayLayout,
    statemap: StateMap,
    table: UnitCellStateTable,
    f: Frequency,
    feed: FeedSpec,
    element: ElementModel,
) -> np.ndarray:
    """Feed illumination times the S21 of each element's state"""
    _require_transmissive(table)
    return feed_illumination(layout, f, feed, element) * statemap.coefficients(table, f)


def continuous_transmit_weights(
    layout: ArrayLayout,
    profile: PhaseProfile,
    f: Frequency,
    feed: FeedSpec,
    element: ElementModel,
    loss_db: float = 0.0,
) -> np.ndarray:
    """Weights of an unquantized cell realizing every ideal phase with ``loss_db`` insertion loss"""
    s21 = 10.0 ** (-loss_db / 20.0) * np.exp(1j * profile.ideal_phase)
    return feed_illumination(layout, f, feed, element) * s21


def gain_pattern_from_weights(
    layout: ArrayLayout,
    weights: np.ndarray,
    f: Frequency,
    element: ElementModel,
    cut_phi: float = 0.0,
    grid_deg: float = 0.1,
    mapper: Optional[AngleMapper] = None,
    span_deg: float = 90.0,
) -> FarFieldPattern:
    """Realized-gain cut of arbitrary feed-referenced weights"""
    scaled = math.sqrt(4.0 * math.pi) * np.asarray(weights, dtype=complex)
    return _cut_pattern(
        layout.x, layout.y, scaled, f, element, cut_phi, grid_deg, Normalization.ABSOLUTE_GAIN_DBI, mapper, span_deg
    )


def transmit_gain_pattern(
    layout: ArrayLayout,
    statemap: StateMap,
    table: UnitCellStateTable,
    f: Frequency,
    feed: FeedSpec,
    element: Optional[ElementModel] = None,
    cut_phi: float = 0.0,
    grid_deg: float = 0.1,
    mapper: Optional[AngleMapper] = None,
    span_deg: float = 90.0,
) -> FarFieldPattern:
    """Realized gain (dBi) of a T-RIS; feed power is not renormalized, so spillover is a loss."""
    element = element or ElementModel(source=ExcitationSource.FEED)
    weights = transmit_weights(layout, statemap, table, f, feed, element)
    return gain_pattern_from_weights(layout, weights, f, element, cut_phi, grid_deg, mapper, span_deg)


def gain_toward(
    layout: ArrayLayout,
    weights: np.ndarray,
    f: Frequency,
    element: ElementModel,
    direction: Direction,
) -> float:
    """Realized gain in dBi toward a single direction"""
    value = array_pattern(
        layout.x, layout.y, weights, f, np.array([direction.theta]), np.array([direction.phi]), element
    )[0]
    power = 4.0 * math.pi * abs(value) ** 2
    return 10.0 * math.log10(power) if power > 0 else DB_FLOOR


def transmit_gain_sweep(
    layout: ArrayLayout,
    statemap: StateMap,
    table: UnitCellStateTable,
    feed: FeedSpec,
    element: ElementModel,
    target: Direction,
    frequencies: Sequence[Frequency],
) -> List[Tuple[Frequency, float]]:
    """Realized gain toward ``target`` of one fixed state map at each frequency.

    The map stays as quantized at the design frequency; S21 and the feed
    illumination are re-evaluated per point.
    """
    return [
        (f, gain_toward(layout, transmit_weights(layout, statemap, table, f, feed, element), f, element, target))
        for f in frequencies
    ]


def sphere_pattern(
    layout: ArrayLayout,
    weights: np.ndarray,
    f: Frequency,
    element: ElementModel,
    theta_step_deg: float = 0.5,
    phi_step_deg: float = 1.0,
    mapper: Optional[AngleMapper] = None,
) -> FarFieldPattern:
    """Full-sphere sampling (theta in [0, 180], phi in [0, 360]) for directivity"""
    if theta_step_deg <= 0 or phi_step_deg <= 0:
        raise DomainError("Sphere grid steps must be positive")
    n_t = int(round(180.0 / theta_step_deg))
    n_p = int(round(360.0 / phi_step_deg))
    theta = np.radians(np.linspace(0.0, 180.0, n_t + 1))
    phi = np.radians(np.linspace(0.0, 360.0, n_p + 1))
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    values = array_pattern(
        layout.x, layout.y, math.sqrt(4.0 * math.pi) * np.asarray(weights, dtype=complex),
        f, tt.ravel(), pp.ravel(), element, mapper,
    )
    return FarFieldPattern(
        theta, phi, values.reshape(tt.shape), Normalization.ABSOLUTE_GAIN_DBI, f, sphere=True
    )


def directivity(pattern: FarFieldPattern) -> float:
    """D = 4*pi*max|F|^2 / integral |F|^2 dOmega, in dBi (trapezoidal rule)."""
    if not pattern.sphere:
        raise DomainError("Directivity needs a full-sphere pattern, got a cut")
    power = np.abs(pattern.field) ** 2
    integrand = power * np.sin(pattern.theta)[:, None]
    total = trapezoid(trapezoid(integrand, pattern.phi, axis=1), pattern.theta)
    if total <= 0:
        raise DomainError("Pattern carries no power")
    return 10.0 * math.log10(4.0 * math.pi * float(power.max()) / float(total))


def _parabolic_peak(values: np.ndarray, angles: np.ndarray, i: int) -> Tuple[float, float]:
    y0, ym, yp = values[i], values[i - 1], values[i + 1]
    denom = ym - 2.0 * y0 + yp
    if denom >= 0:
        return float(angles[i]), float(y0)
    delta = 0.5 * (ym - yp) / denom
    step = angles[i + 1] - angles[i]
    return float(angles[i] + delta * step), float(y0 - 0.25 * (ym - yp) * delta)


def _local_maxima(values: np.ndarray) -> np.ndarray:
    inner = np.arange(1, values.size - 1)
    mask = (values[inner] >= values[inner - 1]) & (values[inner] >= values[inner + 1])
    mask &= (values[inner] > values[inner - 1]) | (values[inner] > values[inner + 1])
    return inner[mask]


def _crossing(values: np.ndarray, angles: np.ndarray, start: int, step: int, level: float) -> Optional[float]:
    i = start
    while 0 <= i + step < values.size:
        j = i + step
        if values[j] < level:
            frac = (values[i] - level) / (values[i] - values[j])
            return float(angles[i] + frac * (angles[j] - angles[i]))
        i = j
    return None


def pattern_metrics(pattern: FarFieldPattern, target: Optional[Direction] = None) -> PatternMetrics:
    """Peak, sidelobe level, half-power beamwidth and pointing error of a cut pattern.

    The peak is refined by a parabola through the three samples around the
    maximum. When several samples tie for the maximum (mirror lobes), the one
    nearest the target wins. Sidelobes are the local maxima outside the
    null-to-null main beam.
    """
    if pattern.sphere:
        raise DomainError("Metrics are defined on cut patterns")
    values = pattern.value_db
    angles = pattern.theta_deg
    if values.size < 3:
        raise DomainError("Pattern metrics need at least 3 samples")
    target_deg = None if target is None else math.degrees(target.signed_theta_in_cut(pattern.cut_phi))

    top = values.max()
    candidates = np.flatnonzero(values >= top - PEAK_TIE_DB)
    if target_deg is not None:
        i_peak = int(candidates[np.argmin(np.abs(angles[candidates] - target_deg))])
    else:
        i_peak = int(candidates[0])
    if i_peak == 0 or i_peak == values.size - 1:
        return PatternMetrics(None, None, None, None, None, defined=False)

    peak_deg, peak_db = _parabolic_peak(values, angles, i_peak)

    left = i_peak
    while left > 0 and values[left - 1] <= values[left]:
        left -= 1
    right = i_peak
    while right < values.size - 1 and values[right + 1] <= values[right]:
        right += 1
    sidelobes = [
        _parabolic_peak(values, angles, int(k))[1] for k in _local_maxima(values) if k < left or k > right
    ]
    sll_db = min(0.0, max(sidelobes) - peak_db) if sidelobes else None

    lo = _crossing(values, angles, i_peak, -1, peak_db - 3.0)
    hi = _crossing(values, angles, i_peak, +1, peak_db - 3.0)
    hpbw = hi - lo if lo is not None and hi is not None else None

    pointing = abs(peak_deg - target_deg) if target_deg is not None else None
    return PatternMetrics(
        peak_deg=peak_deg,
        peak_db=peak_db,
        sll_db=sll_db,
        hpbw_deg=hpbw,
        pointing_error_deg=pointing,
    )


def lobe_directions(pattern: FarFieldPattern, threshold_db: float = -6.0) -> List[float]:
    """Signed angles (deg) of local maxima within ``threshold_db`` of the peak"""
    values = pattern.value_db
    angles = pattern.theta_deg
    top = values.max()
    lobes = []
    for k in _local_maxima(values):
        angle, level = _parabolic_peak(values, angles, int(k))
        if level >= top + threshold_db:
            lobes.append(angle)
    return lobes


def fspl(f: Frequency, distance: float) -> float:
    """Free-space path loss 20*log10(4*pi*d/lambda) in dB."""
    if distance <= 0:
        raise DomainError(f"Distance must be positive, got {distance!r}")
    return 20.0 * math.log10(4.0 * math.pi * distance / f.wavelength)


def received_power_dbm(pt_dbm: float, gt_dbi: float, gr_dbi: float, f: Frequency, distance: float) -> float:
    """Friis link budget: Pr = Pt + Gt + Gr - FSPL."""
    return pt_dbm + gt_dbi + gr_dbi - fspl(f, distance)
