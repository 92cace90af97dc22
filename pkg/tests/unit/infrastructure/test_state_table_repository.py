"""
Unit tests for the state-table CSV repository.
Tests directives, schema errors and their line numbers.
"""

import pytest

from risynth.internal.domain.errors import (
    MismatchedGridError,
    NonMonotoneFrequencyError,
    PassivityError,
    StateTableError,
    StateTableSchemaError,
    StateTableTooSmallError,
)
from risynth.internal.domain.unit_cell import UnitCellKind
from risynth.internal.repository.state_table_repository import CsvStateTableRepository, load_state_table

HEADER = "freq_ghz,state,mag_db,phase_deg"


def csv_text(*rows: str, directives: str = "#kind=reflective") -> str:
    return "\n".join([directives, HEADER, *rows]) + "\n"


@pytest.fixture
def repository():
    return CsvStateTableRepository()


class TestParse:
    """Tests for well-formed tables."""

    def test_minimal_table(self, repository):
        table = repository.parse(csv_text("140,A,-1,0", "150,A,-1,10", "140,B,-2,180", "150,B,-2,190"))
        assert table.kind is UnitCellKind.REFLECTIVE
        assert table.states == ("A", "B")
        assert table.frequencies.tolist() == [140e9, 150e9]

    def test_directives_and_comments(self, repository):
        """Test metadata directives and plain comments."""
        text = "\n".join(
            [
                "# a plain comment",
                "#kind=transmissive",
                "#eps_r=3.78",
                "#thickness_mm=0.254",
                "#source=digitized",
                HEADER,
                "140,A,-1,0",
                "140,B,-1,180",
            ]
        )
        table = repository.parse(text)
        assert table.kind is UnitCellKind.TRANSMISSIVE
        assert table.metadata.eps_r == pytest.approx(3.78)
        assert table.metadata.thickness_m == pytest.approx(0.254e-3)
        assert table.metadata.source == "digitized"

    def test_active_flag_allows_gain(self, repository):
        text = csv_text("140,A,1.0,0", "140,B,-1,180", directives="#active=true")
        assert repository.parse(text).active

    def test_shipped_tables_load(self, data_dir, repository):
        for path in sorted(data_dir.glob("*.csv")):
            table = repository.load(path)
            assert len(table.states) == 2
            assert table.f_min == pytest.approx(110e9)
            assert table.f_max == pytest.approx(170e9)


class TestSchemaErrors:
    """Tests for rejected tables and the lines they point at."""

    def test_missing_header(self, repository):
        with pytest.raises(StateTableSchemaError) as exc_info:
            repository.parse("#kind=reflective\n140,A,-1,0\n")
        assert exc_info.value.line == 2

    def test_unknown_directive(self, repository):
        with pytest.raises(StateTableSchemaError) as exc_info:
            repository.parse(csv_text("140,A,-1,0", "140,B,-1,180", directives="#colour=blue"))
        assert exc_info.value.line == 1

    def test_unknown_kind(self, repository):
        with pytest.raises(StateTableSchemaError):
            repository.parse(csv_text("140,A,-1,0", "140,B,-1,180", directives="#kind=absorptive"))

    def test_bad_number(self, repository):
        with pytest.raises(StateTableSchemaError) as exc_info:
            repository.parse(csv_text("140,A,-1,0", "140,B,abc,180"))
        assert exc_info.value.line == 4
        assert "mag_db" in str(exc_info.value)

    def test_wrong_column_count(self, repository):
        with pytest.raises(StateTableSchemaError):
            repository.parse(csv_text("140,A,-1"))

    def test_non_monotone_frequency(self, repository):
        """Test a repeated frequency within a state points at the offending row."""
        with pytest.raises(NonMonotoneFrequencyError) as exc_info:
            repository.parse(csv_text("140,A,-1,0", "140,A,-1,0", "140,B,-1,180"))
        assert exc_info.value.line == 4

    def test_mismatched_grid(self, repository):
        with pytest.raises(MismatchedGridError) as exc_info:
            repository.parse(csv_text("140,A,-1,0", "150,A,-1,0", "140,B,-1,180", "155,B,-1,180"))
        assert exc_info.value.line == 6

    def test_missing_sample(self, repository):
        with pytest.raises(MismatchedGridError):
            repository.parse(csv_text("140,A,-1,0", "150,A,-1,0", "140,B,-1,180"))

    def test_passivity(self, repository):
        with pytest.raises(PassivityError):
            repository.parse(csv_text("140,A,1.0,0", "140,B,-1,180"))

    def test_single_state(self, repository):
        with pytest.raises(StateTableTooSmallError):
            repository.parse(csv_text("140,A,-1,0", "150,A,-1,0"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(StateTableError):
            load_state_table(tmp_path / "absent.csv")

    def test_non_utf8_file(self, tmp_path, repository):
        path = tmp_path / "latin1.csv"
        path.write_bytes(csv_text("140,A,-1,0", "150,A,-1,10").encode("utf-8") + b"140,\xb0B,-2,180\n")
        with pytest.raises(StateTableSchemaError, match="line 5: .*UTF-8") as exc_info:
            repository.load(path)
        assert exc_info.value.line == 5

    def test_error_message_carries_line(self, repository):
        with pytest.raises(StateTableError, match="line 4"):
            repository.parse(csv_text("140,A,-1,0", "140,B,-1,nan"))
