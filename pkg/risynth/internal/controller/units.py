"""
Unit-Suffixed Quantities

Parses command-line values such as ``150GHz``, ``4mm``, ``30deg``, ``18.5f``
or ``4.3k`` into SI floats. A bare number takes the flag's default unit.
"""

import math
import re
from typing import Dict, Tuple

from ..domain.errors import DomainError

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\d\s][^\s]*)?\s*$")

FREQUENCY_UNITS: Dict[str, float] = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12}
LENGTH_UNITS: Dict[str, float] = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6}
ANGLE_UNITS: Dict[str, float] = {"deg": math.pi / 180.0, "°": math.pi / 180.0, "rad": 1.0}
SI_PREFIXES: Dict[str, float] = {
    "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3,
    "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}


class UnitParseError(DomainError):
    """A command-line quantity could not be parsed"""


def _split(text: str) -> Tuple[float, str]:
    match = _QUANTITY.match(str(text))
    if not match:
        raise UnitParseError(f"not a number with an optional unit: '{text}'")
    return float(match.group(1)), match.group(2) or ""


def _scaled(text: str, units: Dict[str, float], default: str, kind: str) -> float:
    value, unit = _split(text)
    key = (unit or default).lower()
    if key not in units:
        raise UnitParseError(f"unknown {kind} unit '{unit}' in '{text}' (use one of {', '.join(units)})")
    return value * units[key]


def parse_frequency(text: str, default: str = "GHz") -> float:
    """Frequency in Hz (bare numbers are GHz)."""
    return _scaled(text, FREQUENCY_UNITS, default, "frequency")


def parse_length(text: str, default: str = "mm") -> float:
    """Length in meters (bare numbers are millimeters)."""
    return _scaled(text, LENGTH_UNITS, default, "length")


def parse_angle(text: str, default: str = "deg") -> float:
    """Angle in radians (bare numbers are degrees)."""
    return _scaled(text, ANGLE_UNITS, default, "angle")


def parse_si(text: str, unit: str = "") -> float:
    """Value with an optional SI prefix and unit symbol: '18.5f', '18.5fF', '4.3k', '6.13ohm'."""
    value, suffix = _split(text)
    for symbol in (unit, "ohm", "Ω", "F"):
        if symbol and suffix.endswith(symbol):
            suffix = suffix[: -len(symbol)]
            break
    if not suffix:
        return value
    if suffix not in SI_PREFIXES:
        raise UnitParseError(f"unknown SI prefix '{suffix}' in '{text}'")
    return value * SI_PREFIXES[suffix]


def parse_db(text: str, unit: str = "dB") -> float:
    """Plain decibel value, optionally suffixed with ``unit`` (dB, dBi, dBm)."""
    value, suffix = _split(text)
    if suffix and suffix.lower() != unit.lower():
        raise UnitParseError(f"expected a value in {unit}, got '{text}'")
    return value
