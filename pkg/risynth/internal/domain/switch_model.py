"""
Switch Equivalent-Circuit Models

Lumped parallel-RC models of two-state RF switches and the figures of merit
derived from them. Each state is a resistor R in parallel with a capacitor C:

    Z = R / (1 + j*omega*R*C)

The RF-SOI CMOS values published for the D-band T-RIS cell are provided as
``CMOS_RF_SOI_45NM``. Other technologies (Schottky, memristor, PCM) are
described either by user-supplied (R, C) pairs or directly by their measured
state tables in ``unit_cell``.

A switch mounted in series in a z0 line is a scikit-rf two-port; insertion
loss and isolation are read from its S21 in the ON and OFF state.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
import skrf as rf

from .entities import ComplexCoefficient, Frequency
from .errors import DomainError

DEFAULT_Z0 = 50.0


class SwitchState(Enum):
    """The two states of a 1-bit switch"""
    ON = "on"
    OFF = "off"


@dataclass(frozen=True)
class SwitchCircuit:
    """Parallel RC equivalent circuit per switch state"""
    r_on: float
    c_on: float
    r_off: float
    c_off: float

    def __post_init__(self):
        for name in ("r_on", "c_on", "r_off", "c_off"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be positive, got {value!r}")
        if self.r_off <= self.r_on:
            raise DomainError("r_off must exceed r_on (an OFF switch is more resistive)")

    def rc(self, state: SwitchState) -> Tuple[float, float]:
        if state is SwitchState.ON:
            return self.r_on, self.c_on
        return self.r_off, self.c_off


CMOS_RF_SOI_45NM = SwitchCircuit(r_on=6.13, c_on=18.5e-15, r_off=4300.0, c_off=19.0e-15)


def _parallel_rc(r: float, c: float, f_hz):
    return r / (1.0 + 1j * 2.0 * np.pi * np.asarray(f_hz, dtype=float) * r * c)


def impedance(circ: SwitchCircuit, state: SwitchState, f: Frequency) -> ComplexCoefficient:
    """Complex impedance (ohms) of the switch in the given state."""
    r, c = circ.rc(state)
    return ComplexCoefficient.from_complex(complex(_parallel_rc(r, c, f.value)))


def impedance_sweep(circ: SwitchCircuit, state: SwitchState, frequencies_hz: np.ndarray) -> np.ndarray:
    """Vectorised impedance over a frequency array, complex ohms."""
    freqs = np.asarray(frequencies_hz, dtype=float)
    if np.any(freqs <= 0):
        raise DomainError("Frequencies must be positive")
    r, c = circ.rc(state)
    return _parallel_rc(r, c, freqs)


def cutoff_frequency(circ: SwitchCircuit) -> Frequency:
    """Switch cutoff frequency f_c = 1 / (2*pi*R_on*C_off)."""
    return Frequency(1.0 / (2.0 * math.pi * circ.r_on * circ.c_off))


def ron_coff_product(circ: SwitchCircuit) -> float:
    """R_on * C_off in femtoseconds."""
    return circ.r_on * circ.c_off * 1e15


def series_network(
    z: np.ndarray, frequencies_hz: np.ndarray, z0: float = DEFAULT_Z0, name: str = "switch"
) -> rf.Network:
    """Two-port of impedances ``z`` (one per frequency) mounted in series in a z0 line.

    Built from the ABCD matrix [[1, Z], [0, 1]], so S21 = 2*z0 / (2*z0 + Z).
    """
    if z0 <= 0:
        raise DomainError(f"z0 must be positive, got {z0!r}")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    freqs = np.atleast_1d(np.asarray(frequencies_hz, dtype=float))
    if z.shape != freqs.shape:
        raise DomainError(f"Expected one impedance per frequency, got {z.shape} and {freqs.shape}")
    abcd = np.zeros((z.size, 2, 2), dtype=complex)
    abcd[:, 0, 0] = 1.0
    abcd[:, 1, 1] = 1.0
    abcd[:, 0, 1] = z
    frequency = rf.Frequency.from_f(freqs, unit="Hz")
    return rf.Network(frequency=frequency, s=rf.network.a2s(abcd, z0), z0=z0, name=name)


def switch_network(
    circ: SwitchCircuit, state: SwitchState, frequencies_hz: np.ndarray, z0: float = DEFAULT_Z0
) -> rf.Network:
    """Series-mounted switch in one state as a scikit-rf network."""
    freqs = np.atleast_1d(np.asarray(frequencies_hz, dtype=float))
    return series_network(impedance_sweep(circ, state, freqs), freqs, z0, name=state.value)


def insertion_loss_isolation_sweep(
    circ: SwitchCircuit, frequencies_hz: np.ndarray, z0: float = DEFAULT_Z0
) -> Tuple[np.ndarray, np.ndarray]:
    """-|S21| in dB of the ON (insertion loss) and OFF (isolation) networks per frequency"""
    il = -switch_network(circ, SwitchState.ON, frequencies_hz, z0).s_db[:, 1, 0]
    iso = -switch_network(circ, SwitchState.OFF, frequencies_hz, z0).s_db[:, 1, 0]
    return il, iso


def insertion_loss_isolation(circ: SwitchCircuit, f: Frequency, z0: float = DEFAULT_Z0) -> Tuple[float, float]:
    """(insertion loss, isolation) in dB for a series-mounted switch."""
    il, iso = insertion_loss_isolation_sweep(circ, np.array([f.value]), z0)
    return float(il[0]), float(iso[0])
