"""
Scenario Runner Use Cases

Orchestrates one scenario end to end: load the unit-cell table, synthesize
and quantize the phase profile, predict the far field, compute metrics and
write the artifacts. The domain modules stay free of files and settings;
this layer owns both.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Protocol, Tuple

import numpy as np

from ..domain.entities import MM, ArrayLayout, Direction, Frequency, make_grid_layout
from ..domain.errors import KindMismatchError, ScenarioValidationError
from ..domain.farfield import (
    AngleMapper,
    ElementModel,
    ExcitationSource,
    FarFieldPattern,
    PatternMetrics,
    TransmitEfficiencies,
    directivity,
    gain_toward,
    lobe_directions,
    pattern_metrics,
    quantize_toward,
    scattered_pattern,
    sphere_pattern,
    transmit_efficiencies,
    transmit_gain_pattern,
    transmit_gain_sweep,
    transmit_weights,
)
from ..domain.grating import FloquetMode, GratingConfig, propagating_modes, splitter_pattern, sweep_modes
from ..domain.synthesis import FeedSpec, StateMap, collimation_profile, quantize, steering_profile
from ..domain.unit_cell import IdealOneBitCell, UnitCellKind, UnitCellStateTable
from ..dto.outputs import GainSweepEntry, MetricsDocument, ModeDocument, ModeSweepEntry, SummaryDocument
from ..dto.scenario import Scenario, ScenarioMode
from ..infra.config import Settings
from ..observability.logger import RisynthLogger, RunContext, get_logger
from ..repository.output_writer import ArtifactWriter, read_statemap, state_counts
from ..repository.scenario_repository import LoadedScenario


class StateTableRepository(Protocol):
    """Source of unit-cell state tables"""

    def load(self, path: Path) -> UnitCellStateTable:
        ...


# Input/Output DTOs for use cases
@dataclass
class RunRequest:
    """Request DTO for a scenario run"""
    loaded: LoadedScenario
    statemap_path: Optional[Path] = None
    output_dir: Optional[Path] = None


@dataclass
class GainReport:
    """Realized gain of a transmitarray and its efficiency budget"""
    gain_dbi: float
    efficiencies: TransmitEfficiencies
    feed: FeedSpec
    directivity_dbi: Optional[float] = None
    sweep: List[Tuple[Frequency, float]] = field(default_factory=list)


@dataclass
class RunResponse:
    """Response DTO for a scenario run"""
    scenario_hash: str
    summary: SummaryDocument
    files: List[Path] = field(default_factory=list)
    statemap: Optional[StateMap] = None
    pattern: Optional[FarFieldPattern] = None
    metrics: Optional[PatternMetrics] = None
    gain: Optional[GainReport] = None
    modes: Optional[List[FloquetMode]] = None


@dataclass
class PreparedScenario:
    """Scenario values converted to domain objects (SI units)"""
    loaded: LoadedScenario
    scenario_hash: str
    frequency: Frequency
    target: Direction
    incidence: Direction
    element: ElementModel
    cut_phi: float
    grid_deg: float
    span_deg: float = 90.0
    layout: Optional[ArrayLayout] = None
    table: Optional[UnitCellStateTable] = None
    feed: Optional[FeedSpec] = None
    grating: Optional[GratingConfig] = None

    @property
    def scenario(self) -> Scenario:
        return self.loaded.scenario

    def invalid(self, message: str, field_path: str) -> ScenarioValidationError:
        return ScenarioValidationError(message, field_path, self.loaded.line_of(field_path))


def metrics_document(metrics: PatternMetrics) -> MetricsDocument:
    return MetricsDocument(**metrics.to_dict())


def scenario_hash(scenario: Scenario, table_bytes: bytes = b"") -> str:
    """First 16 hex digits of SHA-256 over the canonical scenario JSON and the table file."""
    canonical = json.dumps(scenario.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode("utf-8"))
    digest.update(table_bytes)
    return digest.hexdigest()[:16]


class ScenarioRunner:
    """Runs the synthesize / pattern / gain / grating pipelines of a scenario"""

    def __init__(
        self,
        table_repository: StateTableRepository,
        settings: Settings,
        mapper: Optional[AngleMapper] = None,
        logger: Optional[RisynthLogger] = None,
    ):
        self.table_repository = table_repository
        self.settings = settings
        self.mapper = mapper
        self.logger = logger or get_logger(__name__)

    def prepare(self, loaded: LoadedScenario) -> PreparedScenario:
        """Convert units, load the table and check mode-specific constraints."""
        scenario = loaded.scenario
        f = Frequency.from_ghz(scenario.frequency_ghz)
        table_path = scenario.table_path(loaded.base_dir)
        table_bytes = table_path.read_bytes() if table_path is not None else b""
        digest = scenario_hash(scenario, table_bytes)

        q_e = scenario.output.element_q
        if q_e is None:
            q_e = self.settings.pattern.element_q
        source = ExcitationSource.FEED if scenario.mode is ScenarioMode.TRANSMIT_COLLIMATE else ExcitationSource.PLANE_WAVE
        cut_phi_deg = scenario.output.cut_phi_deg
        if cut_phi_deg is None:
            cut_phi_deg = self.settings.pattern.cut_phi_deg
        if cut_phi_deg is None:
            cut_phi_deg = scenario.target.phi_deg

        prepared = PreparedScenario(
            loaded=loaded,
            scenario_hash=digest,
            frequency=f,
            target=Direction.from_degrees(scenario.target.theta_deg, scenario.target.phi_deg),
            incidence=Direction.from_degrees(scenario.incidence.theta_deg, scenario.incidence.phi_deg),
            element=ElementModel(q_e=q_e, source=source),
            cut_phi=math.radians(cut_phi_deg),
            grid_deg=scenario.output.grid_deg or self.settings.pattern.grid_deg,
            span_deg=self.settings.pattern.theta_span_deg,
        )

        if scenario.array is not None:
            pitch_y = None if scenario.array.pitch_y_mm is None else scenario.array.pitch_y_mm * MM
            prepared.layout = make_grid_layout(scenario.array.nx, scenario.array.ny, scenario.array.pitch_mm * MM, pitch_y)
            if prepared.layout.grating_lobe_capable(f):
                self.logger.warning(
                    "Element pitch exceeds half a wavelength; grating lobes can appear",
                    pitch_wavelengths=list(prepared.layout.pitch_in_wavelengths(f)),
                )

        if scenario.unit_cell is not None:
            prepared.table = self._load_table(prepared, table_path)

        if scenario.mode is ScenarioMode.TRANSMIT_COLLIMATE:
            prepared.feed = self._feed(prepared)
            for ghz in scenario.output.gain_sweep_ghz:
                if not prepared.table.contains(Frequency.from_ghz(ghz)):
                    raise prepared.invalid(
                        f"gain sweep point {ghz:.6g} GHz is outside the table range "
                        f"[{prepared.table.f_min / 1e9:.6g}, {prepared.table.f_max / 1e9:.6g}] GHz",
                        "output.gain_sweep_ghz",
                    )
        elif scenario.output.gain_sweep_ghz:
            raise prepared.invalid("a gain sweep needs a transmit-collimate scenario", "output.gain_sweep_ghz")
        if scenario.mode is ScenarioMode.GRATING:
            g = scenario.grating
            prepared.grating = GratingConfig(
                channel_spacing=g.channel_spacing_mm * MM,
                fill_pattern=tuple(g.fill_pattern),
                incidence=math.radians(g.incidence_deg),
                frequency=f,
            )
            if g.aperture_mm * MM < prepared.grating.effective_period:
                raise prepared.invalid("aperture is narrower than one grating period", "grating.aperture_mm")
        return prepared

    def _load_table(self, prepared: PreparedScenario, table_path: Optional[Path]) -> UnitCellStateTable:
        cell = prepared.scenario.unit_cell
        f = prepared.frequency
        if cell.ideal:
            table = IdealOneBitCell(kind=UnitCellKind(cell.kind), loss_db=cell.loss_db).to_state_table(f, f)
        else:
            table = self.table_repository.load(table_path)
            if not table.contains(f):
                raise prepared.invalid(
                    f"{f.ghz:.6g} GHz is outside the table range "
                    f"[{table.f_min / 1e9:.6g}, {table.f_max / 1e9:.6g}] GHz",
                    "frequency_ghz",
                )
        expected = (
            UnitCellKind.TRANSMISSIVE
            if prepared.scenario.mode is ScenarioMode.TRANSMIT_COLLIMATE
            else UnitCellKind.REFLECTIVE
        )
        if table.kind is not expected:
            raise prepared.invalid(
                f"mode '{prepared.scenario.mode.value}' needs a {expected.value} table, got {table.kind.value}",
                "unit_cell.table" if cell.table else "unit_cell.kind",
            )
        return table

    def _feed(self, prepared: PreparedScenario) -> FeedSpec:
        section = prepared.scenario.feed
        defaults = self.settings.feed
        f_over_d = section.f_over_d if section.f_over_d is not None else defaults.f_over_d
        taper = section.edge_taper_db if section.edge_taper_db is not None else defaults.edge_taper_db
        offset = (section.offset_mm[0] * MM, section.offset_mm[1] * MM)
        feed = FeedSpec.for_aperture(prepared.layout, f_over_d, taper, offset)
        if section.q_f is not None:
            feed = FeedSpec(feed.position, section.q_f)
        return feed

    def synthesize(self, prepared: PreparedScenario) -> StateMap:
        """Ideal profile for the scenario mode, quantized onto the table."""
        scenario = prepared.scenario
        if scenario.mode is ScenarioMode.GRATING:
            raise prepared.invalid("grating scenarios have no state map", "mode")
        with self.logger.performance("synthesize", elements=prepared.layout.size):
            if scenario.mode is ScenarioMode.TRANSMIT_COLLIMATE:
                profile = collimation_profile(
                    prepared.layout,
                    prepared.frequency,
                    prepared.feed,
                    prepared.target,
                    math.radians(scenario.feed.reference_phase_deg),
                )
                statemap = quantize(profile, prepared.table, prepared.frequency)
            else:
                profile = steering_profile(prepared.layout, prepared.frequency, prepared.target, prepared.incidence)
                statemap = quantize_toward(
                    prepared.layout,
                    profile,
                    prepared.table,
                    prepared.frequency,
                    prepared.target,
                    prepared.incidence,
                    prepared.element,
                    self.settings.synthesis.reference_phase_steps,
                )
        self.logger.synthesis(
            "Quantized phase profile",
            {
                "state_counts": state_counts(statemap),
                "max_residual_deg": float(np.degrees(np.max(np.abs(statemap.residual_error)))),
            },
        )
        return statemap

    def load_statemap(self, prepared: PreparedScenario, path: Path) -> StateMap:
        statemap = read_statemap(path, prepared.layout)
        statemap.check_bound(prepared.table)
        return statemap

    def pattern(self, prepared: PreparedScenario, statemap: StateMap) -> FarFieldPattern:
        """Normalized RCS cut (reflect) or realized-gain cut (transmit)."""
        with self.logger.performance("pattern", grid_deg=prepared.grid_deg):
            if prepared.scenario.mode is ScenarioMode.TRANSMIT_COLLIMATE:
                return transmit_gain_pattern(
                    prepared.layout,
                    statemap,
                    prepared.table,
                    prepared.frequency,
                    prepared.feed,
                    prepared.element,
                    prepared.cut_phi,
                    prepared.grid_deg,
                    self.mapper,
                    prepared.span_deg,
                )
            return scattered_pattern(
                prepared.layout,
                statemap,
                prepared.table,
                prepared.frequency,
                prepared.incidence,
                prepared.element,
                prepared.cut_phi,
                prepared.grid_deg,
                self.mapper,
                prepared.span_deg,
            )

    def gain(self, prepared: PreparedScenario, statemap: StateMap) -> GainReport:
        """Realized gain toward the target with spillover and taper efficiencies."""
        if prepared.scenario.mode is not ScenarioMode.TRANSMIT_COLLIMATE:
            raise KindMismatchError("gain is defined for transmit-collimate scenarios only")
        f = prepared.frequency
        weights = transmit_weights(prepared.layout, statemap, prepared.table, f, prepared.feed, prepared.element)
        report = GainReport(
            gain_dbi=gain_toward(prepared.layout, weights, f, prepared.element, prepared.target),
            efficiencies=transmit_efficiencies(prepared.layout, f, prepared.feed, prepared.element),
            feed=prepared.feed,
        )
        if prepared.scenario.output.directivity:
            with self.logger.performance("directivity"):
                sphere = sphere_pattern(
                    prepared.layout,
                    weights,
                    f,
                    prepared.element,
                    self.settings.pattern.sphere_theta_step_deg,
                    self.settings.pattern.sphere_phi_step_deg,
                    self.mapper,
                )
                report.directivity_dbi = directivity(sphere)
        if prepared.scenario.output.gain_sweep_ghz:
            with self.logger.performance("gain_sweep", points=len(prepared.scenario.output.gain_sweep_ghz)):
                report.sweep = transmit_gain_sweep(
                    prepared.layout,
                    statemap,
                    prepared.table,
                    prepared.feed,
                    prepared.element,
                    prepared.target,
                    [Frequency.from_ghz(v) for v in prepared.scenario.output.gain_sweep_ghz],
                )
        return report

    def run(self, request: RunRequest, stage: str = "run") -> RunResponse:
        """Execute ``stage`` (run, synthesize, pattern or gain) and write its artifacts."""
        loaded = request.loaded
        prepared = self.prepare(loaded)
        scenario = prepared.scenario
        out_dir = request.output_dir or (loaded.base_dir / scenario.output.directory)
        writer = ArtifactWriter(out_dir, scenario.output_prefix, self.settings.output.significant_digits)

        with RunContext(correlation_id=prepared.scenario_hash, command=stage):
            self.logger.info(
                "Running scenario", scenario=scenario.name, mode=scenario.mode.value, stage=stage
            )
            if scenario.mode is ScenarioMode.GRATING:
                if stage not in ("run", "pattern"):
                    raise prepared.invalid(f"'{stage}' is not available for grating scenarios", "mode")
                return self._run_grating(prepared, writer)
            return self._run_array(prepared, writer, request.statemap_path, stage)

    def _run_array(
        self, prepared: PreparedScenario, writer: ArtifactWriter, statemap_path: Optional[Path], stage: str
    ) -> RunResponse:
        scenario = prepared.scenario
        if statemap_path is not None:
            statemap = self.load_statemap(prepared, statemap_path)
        else:
            statemap = self.synthesize(prepared)
        files = []
        if stage in ("run", "synthesize") and statemap_path is None:
            files.append(writer.statemap(statemap))

        pattern = None
        metrics = PatternMetrics(None, None, None, None, None, defined=False)
        if stage in ("run", "pattern", "gain"):
            pattern = self.pattern(prepared, statemap)
            metrics = pattern_metrics(pattern, prepared.target)
            if not metrics.defined:
                self.logger.warning("Pattern peak lies on the edge of the cut; metrics undefined")
        if stage in ("run", "pattern"):
            files.append(writer.pattern(pattern, prepared.scenario_hash))
            files.append(writer.json("metrics", metrics_document(metrics)))

        gain = None
        if scenario.mode is ScenarioMode.TRANSMIT_COLLIMATE and stage in ("run", "gain"):
            gain = self.gain(prepared, statemap)
        elif stage == "gain":
            raise prepared.invalid("'gain' needs a transmit-collimate scenario", "mode")

        summary = SummaryDocument(
            scenario=scenario.name,
            scenario_hash=prepared.scenario_hash,
            mode=scenario.mode.value,
            frequency_ghz=prepared.frequency.ghz,
            normalization=pattern.normalization.value if pattern is not None else "none",
            metrics=metrics_document(metrics),
            files=writer.file_names("summary.json"),
            state_counts=state_counts(statemap),
            max_residual_deg=float(np.degrees(np.max(np.abs(statemap.residual_error)))),
        )
        if gain is not None:
            summary.gain_dbi = gain.gain_dbi
            summary.spillover_efficiency = gain.efficiencies.spillover
            summary.taper_efficiency = gain.efficiencies.taper
            summary.aperture_efficiency = gain.efficiencies.aperture
            summary.directivity_dbi = gain.directivity_dbi
            summary.feed_q = gain.feed.q_f
            summary.focal_distance_mm = gain.feed.focal_distance / MM
            if gain.sweep:
                summary.gain_sweep = [GainSweepEntry(frequency_ghz=at.ghz, gain_dbi=dbi) for at, dbi in gain.sweep]
            self.logger.pattern("Transmit gain", {"gain_dbi": gain.gain_dbi, "spillover": gain.efficiencies.spillover})
        files.append(writer.json("summary", summary))
        return RunResponse(
            scenario_hash=prepared.scenario_hash,
            summary=summary,
            files=files,
            statemap=statemap,
            pattern=pattern,
            metrics=metrics,
            gain=gain,
        )

    def _run_grating(self, prepared: PreparedScenario, writer: ArtifactWriter) -> RunResponse:
        g = prepared.scenario.grating
        tolerance = self.settings.grating.grazing_tolerance
        modes = propagating_modes(prepared.grating, tolerance)
        mode_docs = [ModeDocument(**m.to_dict()) for m in modes]
        files = [writer.json("modes", mode_docs)]

        pattern = splitter_pattern(
            prepared.grating, g.aperture_mm * MM, prepared.element, prepared.grid_deg, self.mapper, prepared.span_deg
        )
        metrics = pattern_metrics(pattern, prepared.target)
        lobes = lobe_directions(pattern, self.settings.grating.lobe_threshold_db)
        files.append(writer.pattern(pattern, prepared.scenario_hash))
        files.append(writer.json("metrics", metrics_document(metrics)))

        sweep = None
        if g.sweep_ghz:
            sweep = [
                ModeSweepEntry(
                    frequency_ghz=f.ghz,
                    propagating_count=sum(1 for m in at_f if m.propagating),
                    modes=[ModeDocument(**m.to_dict()) for m in at_f],
                )
                for f, at_f in sweep_modes(prepared.grating, [Frequency.from_ghz(v) for v in g.sweep_ghz], tolerance)
            ]
        summary = SummaryDocument(
            scenario=prepared.scenario.name,
            scenario_hash=prepared.scenario_hash,
            mode=prepared.scenario.mode.value,
            frequency_ghz=prepared.frequency.ghz,
            normalization=pattern.normalization.value,
            metrics=metrics_document(metrics),
            files=writer.file_names("summary.json"),
            modes=mode_docs,
            mode_sweep=sweep,
            lobes_deg=lobes,
        )
        self.logger.pattern(
            "Grating modes", {"propagating": sum(1 for m in modes if m.propagating), "lobes_deg": lobes}
        )
        files.append(writer.json("summary", summary))
        return RunResponse(
            scenario_hash=prepared.scenario_hash,
            summary=summary,
            files=files,
            pattern=pattern,
            metrics=metrics,
            modes=modes,
        )

