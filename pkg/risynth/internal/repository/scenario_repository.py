"""
Scenario File Loading

Reads a TOML scenario, validates it against the pydantic schema and turns
every failure into a ScenarioValidationError naming the field path and, when
it can be located, the line of the offending key.
"""

import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from ..domain.errors import ScenarioValidationError
from ..dto.scenario import Scenario

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 backport
    import tomli as tomllib

_SECTION = re.compile(r"^\s*\[\s*([A-Za-z0-9_.]+)\s*\]\s*(#.*)?$")


@dataclass(frozen=True)
class LoadedScenario:
    """A validated scenario with the file it came from"""
    scenario: Scenario
    path: Path
    text: str

    @property
    def base_dir(self) -> Path:
        return self.path.parent

    def line_of(self, field_path: str) -> Optional[int]:
        return locate_line(self.text, field_path)


def locate_line(text: str, field_path: str) -> Optional[int]:
    """Best-effort 1-based line of ``section.key`` (or of the section header)."""
    if not field_path:
        return None
    parts = [p for p in field_path.split(".") if not p.isdigit()]
    *sections, key = parts
    wanted = ".".join(sections)
    current = ""
    section_line: Optional[int] = None
    key_pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for number, line in enumerate(text.splitlines(), start=1):
        match = _SECTION.match(line)
        if match:
            current = match.group(1)
            if current == ".".join(parts):
                section_line = number
            continue
        if current == wanted and key_pattern.match(line):
            return number
    return section_line


def _format_loc(loc: Sequence) -> str:
    return ".".join(str(part) for part in loc)


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Parse and validate scenario text."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            match = re.search(r"line (\d+)", str(exc))
            line = int(match.group(1)) if match else None
        raise ScenarioValidationError(f"invalid TOML in {source}: {exc}", "", line) from exc
    try:
        return Scenario.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        field_path = _format_loc(first["loc"])
        message = first["msg"]
        if len(exc.errors()) > 1:
            message += f" (and {len(exc.errors()) - 1} more error(s))"
        raise ScenarioValidationError(message, field_path, locate_line(text, field_path)) from exc


def load_scenario(path: Path) -> LoadedScenario:
    """Read, validate and check the files a scenario references."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ScenarioValidationError(f"cannot read scenario file: {exc.strerror or exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        raise ScenarioValidationError(f"scenario file is not valid UTF-8: {exc.reason}", line=line) from exc
    scenario = parse_scenario(text, str(path))
    table = scenario.table_path(path.parent)
    if table is not None and not table.is_file():
        raise ScenarioValidationError(
            f"state table not found: {table}", "unit_cell.table", locate_line(text, "unit_cell.table")
        )
    return LoadedScenario(scenario=scenario, path=path.resolve(), text=text)
