"""
Contract tests for the JSON and CSV artifacts.
Validates written files against the JSON schemas of the output documents.
"""

import csv
import json

import jsonschema
import pytest
from jsonschema import Draft202012Validator

from risynth.internal.dto.outputs import MetricsDocument, ModeDocument, SummaryDocument
from risynth.internal.infra.config import get_test_settings
from risynth.internal.infra.executor import mapper_from_settings
from risynth.internal.repository.output_writer import render_json
from risynth.internal.repository.scenario_repository import load_scenario
from risynth.internal.repository.state_table_repository import CsvStateTableRepository
from risynth.internal.usecase.scenario_runner import RunRequest, ScenarioRunner

pytestmark = pytest.mark.contract

METRICS_SCHEMA = MetricsDocument.model_json_schema()
SUMMARY_SCHEMA = SummaryDocument.model_json_schema()
MODES_SCHEMA = {"type": "array", "items": ModeDocument.model_json_schema()}


@pytest.fixture
def artifacts(workspace, tmp_path):
    """Run every shipped scenario into one output directory."""
    settings = get_test_settings()
    runner = ScenarioRunner(CsvStateTableRepository(), settings, mapper_from_settings(settings.compute))
    out = tmp_path / "out"
    for path in sorted((workspace / "scenarios").glob("*.toml")):
        runner.run(RunRequest(load_scenario(path), output_dir=out))
    return out


def load(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestSchemas:
    """Tests for the schemas themselves."""

    def test_schemas_are_valid(self):
        for schema in (METRICS_SCHEMA, SUMMARY_SCHEMA, MODES_SCHEMA):
            Draft202012Validator.check_schema(schema)

    def test_metrics_keys_are_required(self):
        assert set(METRICS_SCHEMA["required"]) == {"peak_deg", "peak_db", "sll_db", "hpbw_deg", "pointing_error_deg"}

    def test_undefined_metrics_validate_as_nulls(self):
        """Test a pattern without an interior peak still satisfies the metrics contract."""
        doc = MetricsDocument(peak_deg=None, peak_db=None, sll_db=None, hpbw_deg=None, pointing_error_deg=None)
        payload = json.loads(render_json(doc))
        jsonschema.validate(payload, METRICS_SCHEMA)
        assert all(value is None for value in payload.values())

    def test_extra_keys_rejected(self):
        payload = {"peak_deg": 1.0, "peak_db": 0.0, "sll_db": -13.0, "hpbw_deg": 5.0, "pointing_error_deg": 0.1}
        jsonschema.validate(payload, METRICS_SCHEMA)
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate({**payload, "gain": 3.0}, METRICS_SCHEMA)


class TestWrittenArtifacts:
    """Tests for files written by real runs."""

    def test_metrics_files(self, artifacts):
        paths = sorted(artifacts.glob("*_metrics.json"))
        assert len(paths) == 4
        for path in paths:
            jsonschema.validate(load(path), METRICS_SCHEMA)

    def test_summary_files(self, artifacts):
        paths = sorted(artifacts.glob("*_summary.json"))
        assert len(paths) == 4
        for path in paths:
            summary = load(path)
            jsonschema.validate(summary, SUMMARY_SCHEMA)
            for name in summary["files"]:
                assert (artifacts / name).is_file()

    def test_optional_summary_fields_are_explicit(self, artifacts):
        """Test fields that do not apply to a mode are written as null, not omitted."""
        summary = load(artifacts / "schottky-steer-30_summary.json")
        assert set(summary) == set(SUMMARY_SCHEMA["properties"])
        assert summary["gain_dbi"] is None
        assert summary["modes"] is None
        assert summary["gain_sweep"] is None

    def test_transmit_summary_has_gain_budget(self, artifacts):
        summary = load(artifacts / "pcm-tris-broadside_summary.json")
        for key in ("gain_dbi", "spillover_efficiency", "taper_efficiency", "aperture_efficiency", "directivity_dbi"):
            assert isinstance(summary[key], float)
        assert [set(entry) for entry in summary["gain_sweep"]] == [{"frequency_ghz", "gain_dbi"}] * 5

    def test_modes_file(self, artifacts):
        jsonschema.validate(load(artifacts / "lm-splitter-4mm_modes.json"), MODES_SCHEMA)

    def test_pattern_csv_layout(self, artifacts):
        """Test pattern files carry the header comment and five numeric columns."""
        for path in sorted(artifacts.glob("*_pattern.csv")):
            comment, *rest = path.read_text(encoding="utf-8").splitlines()
            assert comment.startswith("# normalization=")
            assert "scenario=" in comment
            rows = list(csv.reader(rest))
            assert rows[0] == ["theta_deg", "phi_deg", "value_db", "re", "im"]
            for row in rows[1:]:
                assert len(row) == 5
                [float(cell) for cell in row]

    def test_statemap_csv_layout(self, artifacts):
        rows = list(csv.reader((artifacts / "memristor-steer-30_statemap.csv").read_text().splitlines()))
        assert rows[0] == ["ix", "iy", "state", "ideal_phase_deg", "residual_deg"]
        assert len(rows) == 1 + 400
        assert {row[2] for row in rows[1:]} <= {"OFF", "ON"}
