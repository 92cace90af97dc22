"""
Unit-Cell State-Table CSV Repository

File format (UTF-8)::

    #kind=transmissive
    #source=hand-digitized approximation
    freq_ghz,state,mag_db,phase_deg
    110,000,-1.2,-60.0
    ...

Lines starting with ``#`` are comments; ``#key=value`` comments are
directives. Known directives: kind, active, eps_r, tan_delta, thickness_mm,
source. The header row is required. One row per (state, frequency); each
state's rows must have strictly increasing frequencies and every state must
share the same grid.
"""

import csv
import io
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..domain.entities import GHZ, MM, ComplexCoefficient, Frequency
from ..domain.errors import (
    DomainError,
    MismatchedGridError,
    NonMonotoneFrequencyError,
    StateTableError,
    StateTableSchemaError,
)
from ..domain.unit_cell import SubstrateMetadata, UnitCellKind, UnitCellStateTable
from ..observability.logger import get_logger

logger = get_logger(__name__)

HEADER = ["freq_ghz", "state", "mag_db", "phase_deg"]
_DIRECTIVE = re.compile(r"^#\s*([A-Za-z_]+)\s*=(.*)$")
_KNOWN_DIRECTIVES = {"kind", "active", "eps_r", "tan_delta", "thickness_mm", "source"}


def _parse_bool(value: str, line: int) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise StateTableSchemaError(f"expected true/false, got '{value.strip()}'", line)


def _parse_float(value: str, column: str, line: int) -> float:
    try:
        number = float(value)
    except ValueError:
        raise StateTableSchemaError(f"column '{column}' is not a number: '{value}'", line) from None
    if not math.isfinite(number):
        raise StateTableSchemaError(f"column '{column}' is not finite: '{value}'", line)
    return number


class CsvStateTableRepository:
    """Loads state tables from CSV files"""

    def load(self, path: Path) -> UnitCellStateTable:
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise StateTableError(f"cannot read state table {path}: {exc.strerror or exc}") from exc
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            line = data.count(b"\n", 0, exc.start) + 1
            raise StateTableSchemaError(f"state table {path} is not valid UTF-8: {exc.reason}", line) from exc
        table = self.parse(text)
        logger.debug(
            "Loaded state table",
            path=str(path),
            states=list(table.states),
            points=int(table.frequencies.size),
            kind=table.kind.value,
        )
        return table

    def parse(self, text: str) -> UnitCellStateTable:
        directives: Dict[str, Tuple[str, int]] = {}
        header_seen = False
        rows: Dict[str, List[Tuple[float, float, float, int]]] = {}

        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                match = _DIRECTIVE.match(stripped)
                if match:
                    key = match.group(1).lower()
                    if key not in _KNOWN_DIRECTIVES:
                        raise StateTableSchemaError(f"unknown directive '#{key}'", number)
                    directives[key] = (match.group(2).strip(), number)
                continue
            fields = [f.strip() for f in next(csv.reader(io.StringIO(stripped)))]
            if not header_seen:
                if fields != HEADER:
                    raise StateTableSchemaError(
                        f"expected header '{','.join(HEADER)}', got '{stripped}'", number
                    )
                header_seen = True
                continue
            if len(fields) != len(HEADER):
                raise StateTableSchemaError(f"expected {len(HEADER)} columns, got {len(fields)}", number)
            freq = _parse_float(fields[0], "freq_ghz", number)
            state = fields[1]
            if not state:
                raise StateTableSchemaError("empty state name", number)
            mag = _parse_float(fields[2], "mag_db", number)
            phase = _parse_float(fields[3], "phase_deg", number)
            previous = rows.setdefault(state, [])
            if freq <= 0:
                raise NonMonotoneFrequencyError(f"frequency must be positive, got {freq}", number)
            if previous and freq <= previous[-1][0]:
                raise NonMonotoneFrequencyError(
                    f"state '{state}': {freq} GHz does not increase over {previous[-1][0]} GHz", number
                )
            previous.append((freq, mag, phase, number))

        if not header_seen:
            raise StateTableSchemaError("missing header row")

        kind, active, metadata = self._apply_directives(directives)
        self._check_grids(rows)
        samples = {
            state: [
                (Frequency(freq * GHZ), ComplexCoefficient.from_db_deg(mag, phase))
                for freq, mag, phase, _ in entries
            ]
            for state, entries in rows.items()
        }
        return UnitCellStateTable.from_samples(kind, samples, metadata, active)

    @staticmethod
    def _check_grids(rows: Dict[str, List[Tuple[float, float, float, int]]]) -> None:
        if not rows:
            return
        reference_state, reference = next(iter(rows.items()))
        grid = [entry[0] for entry in reference]
        for state, entries in rows.items():
            for k, entry in enumerate(entries):
                if k >= len(grid) or entry[0] != grid[k]:
                    raise MismatchedGridError(
                        f"state '{state}' is not sampled on the grid of state '{reference_state}'", entry[3]
                    )
            if len(entries) != len(grid):
                raise MismatchedGridError(
                    f"state '{state}' has {len(entries)} samples, '{reference_state}' has {len(grid)}"
                )

    @staticmethod
    def _apply_directives(
        directives: Dict[str, Tuple[str, int]]
    ) -> Tuple[UnitCellKind, bool, SubstrateMetadata]:
        kind = UnitCellKind.REFLECTIVE
        if "kind" in directives:
            value, line = directives["kind"]
            try:
                kind = UnitCellKind(value.lower())
            except ValueError:
                raise StateTableSchemaError(f"unknown kind '{value}'", line) from None
        active = False
        if "active" in directives:
            active = _parse_bool(*directives["active"])

        def number(key: str) -> Optional[float]:
            if key not in directives:
                return None
            value, line = directives[key]
            return _parse_float(value, f"#{key}", line)

        thickness = number("thickness_mm")
        metadata = SubstrateMetadata(
            eps_r=number("eps_r"),
            tan_delta=number("tan_delta"),
            thickness_m=None if thickness is None else thickness * MM,
            source=directives.get("source", ("", 0))[0],
        )
        return kind, active, metadata


def load_state_table(path: Path) -> UnitCellStateTable:
    """Load and validate a state-table CSV."""
    try:
        return CsvStateTableRepository().load(path)
    except DomainError as exc:
        raise StateTableSchemaError(str(exc)) from exc
