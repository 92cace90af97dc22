"""
Artifact Files

Writers (and the StateMap reader) for the files a run produces. Every float
goes through one formatter with a fixed number of significant digits, JSON
keys are sorted and line endings are '\\n', so the same inputs always give
byte-identical files.
"""

import csv
import io
import json
import math
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from ..domain.entities import ArrayLayout
from ..domain.errors import ScenarioValidationError
from ..domain.farfield import FarFieldPattern
from ..domain.synthesis import StateMap

DEFAULT_DIGITS = 9
STATEMAP_HEADER = ["ix", "iy", "state", "ideal_phase_deg", "residual_deg"]
PATTERN_HEADER = ["theta_deg", "phi_deg", "value_db", "re", "im"]


def format_float(value: float, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed significant-digit text; negative zero prints as 0."""
    return f"{float(value) + 0.0:.{digits}g}"


def round_floats(value: Any, digits: int = DEFAULT_DIGITS) -> Any:
    """Round every float in a JSON-like structure to ``digits`` significant digits."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format_float(value, digits)) + 0.0
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    return value


def render_json(document: Any, digits: int = DEFAULT_DIGITS) -> str:
    if isinstance(document, BaseModel):
        document = document.model_dump(mode="json")
    elif isinstance(document, list):
        document = [d.model_dump(mode="json") if isinstance(d, BaseModel) else d for d in document]
    return json.dumps(round_floats(document, digits), sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_statemap_csv(statemap: StateMap, digits: int = DEFAULT_DIGITS) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(STATEMAP_HEADER)
    ix, iy = statemap.layout.indices
    ideal = np.degrees(statemap.ideal_phase)
    residual = np.degrees(statemap.residual_error)
    for k in range(statemap.layout.size):
        writer.writerow(
            [int(ix[k]), int(iy[k]), statemap.states[k], format_float(ideal[k], digits), format_float(residual[k], digits)]
        )
    return buffer.getvalue()


def parse_statemap_csv(text: str, layout: ArrayLayout, source: str = "<statemap>") -> StateMap:
    """Rebuild a StateMap for ``layout``; every (ix, iy) must appear exactly once."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and not row[0].startswith("#")]
    if not rows or [c.strip() for c in rows[0]] != STATEMAP_HEADER:
        raise ScenarioValidationError(f"{source}: expected header '{','.join(STATEMAP_HEADER)}'", "statemap", 1)
    states: List[Optional[str]] = [None] * layout.size
    ideal = np.zeros(layout.size)
    residual = np.zeros(layout.size)
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(STATEMAP_HEADER):
            raise ScenarioValidationError(f"{source}: expected 5 columns", "statemap", line)
        try:
            ix, iy = int(row[0]), int(row[1])
            ideal_deg, residual_deg = float(row[3]), float(row[4])
        except ValueError:
            raise ScenarioValidationError(f"{source}: malformed row {row!r}", "statemap", line) from None
        if not (0 <= ix < layout.nx and 0 <= iy < layout.ny):
            raise ScenarioValidationError(
                f"{source}: element ({ix}, {iy}) is outside the {layout.nx}x{layout.ny} array", "statemap", line
            )
        k = iy * layout.nx + ix
        if states[k] is not None:
            raise ScenarioValidationError(f"{source}: element ({ix}, {iy}) listed twice", "statemap", line)
        states[k] = row[2].strip()
        ideal[k] = math.radians(ideal_deg)
        residual[k] = math.radians(residual_deg)
    if any(s is None for s in states):
        raise ScenarioValidationError(f"{source}: {states.count(None)} element(s) missing", "statemap")
    return StateMap(layout, tuple(states), residual, ideal)


def render_pattern_csv(pattern: FarFieldPattern, scenario_hash: str = "", digits: int = DEFAULT_DIGITS) -> str:
    """Cut pattern with a header comment recording normalization, frequency and scenario hash."""
    buffer = io.StringIO()
    buffer.write(
        f"# normalization={pattern.normalization.value} "
        f"frequency_ghz={format_float(pattern.frequency.ghz, digits)} "
        f"scenario={scenario_hash or 'none'}\n"
    )
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PATTERN_HEADER)
    theta = pattern.theta_deg
    phi = math.degrees(pattern.cut_phi)
    db = pattern.value_db
    for k in range(theta.size):
        value = pattern.field[k]
        writer.writerow(
            [
                format_float(theta[k], digits),
                format_float(phi, digits),
                format_float(db[k], digits),
                format_float(value.real, digits),
                format_float(value.imag, digits),
            ]
        )
    return buffer.getvalue()


class ArtifactWriter:
    """Writes ``<prefix>_<kind>.<ext>`` files into one directory"""

    def __init__(self, directory: Path, prefix: str, digits: int = DEFAULT_DIGITS):
        self.directory = Path(directory)
        self.prefix = prefix
        self.digits = digits
        self.written: List[str] = []

    def _write(self, suffix: str, text: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / f"{self.prefix}_{suffix}"
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        self.written.append(path.name)
        return path

    def statemap(self, statemap: StateMap) -> Path:
        return self._write("statemap.csv", render_statemap_csv(statemap, self.digits))

    def pattern(self, pattern: FarFieldPattern, scenario_hash: str) -> Path:
        return self._write("pattern.csv", render_pattern_csv(pattern, scenario_hash, self.digits))

    def json(self, suffix: str, document: Any) -> Path:
        return self._write(f"{suffix}.json", render_json(document, self.digits))

    def file_names(self, *extra: str) -> List[str]:
        return sorted(set(self.written) | {f"{self.prefix}_{name}" for name in extra})


def read_statemap(path: Path, layout: ArrayLayout) -> StateMap:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioValidationError(f"cannot read state map: {exc.strerror or exc}", "statemap") from exc
    return parse_statemap_csv(text, layout, str(path))


def state_counts(statemap: StateMap) -> Dict[str, int]:
    return dict(sorted(Counter(statemap.states).items()))
