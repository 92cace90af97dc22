"""
Command-Line Interface

argparse front end binding every module: scenario runs (``run``,
``synthesize``, ``pattern``, ``gain``) and the stand-alone calculators
(``grating``, ``unitcell``, ``switch``, ``fspl``).

Results go to stdout (JSON, or CSV for ``grating pattern``), logs and errors
to stderr. Exit codes: 0 success, 1 validation or usage error, 2 runtime error.
"""

import argparse
import math
import sys
from itertools import combinations
from pathlib import Path
from typing import Callable, List, Optional, Sequence, TextIO

import numpy as np

from ..domain.entities import Frequency
from ..domain.errors import (
    DomainError,
    KindMismatchError,
    RisynthError,
    ScenarioValidationError,
    StateTableError,
    UnknownStateError,
)
from ..domain.farfield import ElementModel, fspl, lobe_directions, received_power_dbm
from ..domain.grating import GratingConfig, period_for_split, propagating_modes, splitter_pattern, sweep_modes
from ..domain.switch_model import (
    SwitchCircuit,
    SwitchState,
    cutoff_frequency,
    impedance,
    impedance_sweep,
    insertion_loss_isolation,
    insertion_loss_isolation_sweep,
    ron_coff_product,
)
from ..domain.unit_cell import fractional_bandwidth, insertion_loss, phase_difference
from ..dto.outputs import ModeDocument
from ..infra.config import Settings, get_settings
from ..infra.executor import mapper_from_settings
from ..observability.logger import LoggingConfig, RunContext, get_logger, setup_logging
from ..repository.output_writer import render_json, render_pattern_csv
from ..repository.scenario_repository import load_scenario
from ..repository.state_table_repository import CsvStateTableRepository, load_state_table
from ..usecase.scenario_runner import RunRequest, ScenarioRunner
from .units import UnitParseError, parse_angle, parse_db, parse_frequency, parse_length, parse_si

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

VALIDATION_ERRORS = (ScenarioValidationError, StateTableError, DomainError, KindMismatchError, UnknownStateError)


class UsageError(Exception):
    """Raised instead of exiting so that main() owns the exit code"""

    def __init__(self, message: str, usage: str = ""):
        self.usage = usage
        super().__init__(message)


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1"""

    def error(self, message: str):
        raise UsageError(message, self.format_usage())


def _typed(parse: Callable[[str], float]) -> Callable[[str], float]:
    def convert(text: str) -> float:
        try:
            return parse(text)
        except UnitParseError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    convert.__name__ = parse.__name__.replace("parse_", "")
    return convert


frequency_arg = _typed(parse_frequency)
length_arg = _typed(parse_length)
angle_arg = _typed(parse_angle)
si_arg = _typed(parse_si)
db_arg = _typed(parse_db)


def meters_arg(text: str) -> float:
    return _typed(lambda t: parse_length(t, default="m"))(text)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _fill_pattern(text: str) -> List[bool]:
    values = [v.strip() for v in text.replace(";", ",").split(",") if v.strip()]
    if not values or any(v not in ("0", "1") for v in values):
        raise argparse.ArgumentTypeError(f"fill pattern must be comma-separated 0/1 values, got '{text}'")
    return [v == "1" for v in values]


def _frequency_sweep(text: str) -> List[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("sweep must be START:STOP:STEP, e.g. 110GHz:170GHz:10GHz")
    start, stop, step = (frequency_arg(p) for p in parts)
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("sweep needs STEP > 0 and STOP >= START")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="risynth",
        description="Synthesize 1-bit RIS configurations and predict their D-band far fields.",
    )
    parser.add_argument("--threads", type=_positive_int, default=None, help="Worker threads (overrides RISYNTH_MAX_THREADS)")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default from RISYNTH_LOG_LEVEL)")
    parser.add_argument("--log-format", choices=["json", "text"], default=None, help="Log line format on stderr")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    for name, help_text in (
        ("run", "Synthesize, predict and write every artifact of a scenario"),
        ("synthesize", "Write the quantized state map of a scenario"),
        ("pattern", "Write the far-field cut and metrics of a scenario"),
        ("gain", "Print the realized gain of a transmit-collimate scenario"),
    ):
        sub = commands.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("scenario", type=Path, help="Scenario TOML file")
        sub.add_argument("--out", type=Path, default=None, help="Output directory (overrides [output].directory)")
        if name in ("pattern", "gain"):
            sub.add_argument("--statemap", type=Path, default=None, help="Re-use a state map CSV written by 'synthesize'")
        sub.set_defaults(handler=_cmd_scenario, stage=name)

    grating = commands.add_parser("grating", help="Liquid-metal strip-grating splitter")
    grating_commands = grating.add_subparsers(dest="grating_command", required=True, metavar="SUBCOMMAND")
    for name, help_text in (
        ("modes", "List Floquet orders and whether they propagate (JSON)"),
        ("pattern", "Emit the splitter pattern cut (CSV)"),
        ("period", "Period whose first order leaves at a given angle (JSON)"),
    ):
        sub = grating_commands.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--freq", type=frequency_arg, required=True, help="Frequency (e.g. 150GHz)")
        sub.add_argument("--incidence", type=angle_arg, default=0.0, help="Incidence angle (e.g. 10deg)")
        if name == "period":
            sub.add_argument("--angle", type=angle_arg, required=True, help="First-order split angle (e.g. 30deg)")
            sub.set_defaults(handler=_cmd_grating_period)
            continue
        sub.add_argument("--period", type=length_arg, default=None, help="Grating period, every channel filled (e.g. 4mm)")
        sub.add_argument("--spacing", type=length_arg, default=None, help="Channel spacing (use with --fill)")
        sub.add_argument("--fill", type=_fill_pattern, default=None, help="Repeating fill pattern, e.g. 1,0")
        if name == "modes":
            sub.add_argument("--sweep", type=_frequency_sweep, default=None, help="Also list modes over START:STOP:STEP")
            sub.set_defaults(handler=_cmd_grating_modes)
        else:
            sub.add_argument("--aperture", type=length_arg, required=True, help="Total aperture width (e.g. 24mm)")
            sub.add_argument("--grid", type=angle_arg, default=None, help="Angular grid (default from settings)")
            sub.add_argument("--out", type=Path, default=None, help="CSV file (default: stdout)")
            sub.set_defaults(handler=_cmd_grating_pattern)

    unitcell = commands.add_parser("unitcell", help="Unit-cell state-table metrics")
    unitcell_commands = unitcell.add_subparsers(dest="unitcell_command", required=True, metavar="SUBCOMMAND")
    metrics = unitcell_commands.add_parser("metrics", help="Insertion loss, phase difference and bandwidth (JSON)")
    metrics.add_argument("table", type=Path, help="State-table CSV")
    metrics.add_argument("--freq", type=frequency_arg, required=True, help="Evaluation frequency (e.g. 140GHz)")
    metrics.add_argument("--threshold", type=db_arg, default=1.5, help="Loss threshold for the bandwidth, dB")
    metrics.add_argument("--center", type=frequency_arg, default=None, help="Bandwidth center (default: --freq)")
    metrics.set_defaults(handler=_cmd_unitcell_metrics)

    switch = commands.add_parser("switch", help="Switch equivalent-circuit figures of merit")
    switch_commands = switch.add_subparsers(dest="switch_command", required=True, metavar="SUBCOMMAND")
    fom = switch_commands.add_parser("fom", help="Cutoff frequency, impedances, IL and isolation (JSON)")
    fom.add_argument("--ron", type=si_arg, required=True, help="ON resistance (ohms, e.g. 6.13)")
    fom.add_argument("--con", type=si_arg, required=True, help="ON capacitance (e.g. 18.5f)")
    fom.add_argument("--roff", type=si_arg, required=True, help="OFF resistance (e.g. 4300 or 4.3k)")
    fom.add_argument("--coff", type=si_arg, required=True, help="OFF capacitance (e.g. 19f)")
    fom.add_argument("--freq", type=frequency_arg, default=140e9, help="Evaluation frequency (default 140GHz)")
    fom.add_argument("--z0", type=si_arg, default=None, help="Reference impedance (default from settings)")
    fom.add_argument("--sweep", type=_frequency_sweep, default=None, help="Impedance sweep START:STOP:STEP")
    fom.set_defaults(handler=_cmd_switch_fom)

    link = commands.add_parser("fspl", help="Free-space path loss and optional link budget (JSON)")
    link.add_argument("--freq", type=frequency_arg, required=True, help="Frequency (e.g. 140GHz)")
    link.add_argument("--dist", type=meters_arg, required=True, help="Distance (bare numbers are meters, e.g. 1m)")
    link.add_argument("--pt", type=_typed(lambda t: parse_db(t, "dBm")), default=None, help="Transmit power, dBm")
    link.add_argument("--gt", type=_typed(lambda t: parse_db(t, "dBi")), default=0.0, help="Transmit gain, dBi")
    link.add_argument("--gr", type=_typed(lambda t: parse_db(t, "dBi")), default=0.0, help="Receive gain, dBi")
    link.set_defaults(handler=_cmd_fspl)
    return parser


def _grating_config(args: argparse.Namespace) -> GratingConfig:
    f = Frequency(args.freq)
    if args.period is not None:
        if args.spacing is not None or args.fill is not None:
            raise UsageError("use either --period or --spacing/--fill")
        return GratingConfig.with_period(args.period, f, args.incidence)
    if args.spacing is None:
        raise UsageError("one of --period or --spacing is required")
    return GratingConfig(args.spacing, tuple(args.fill or [True]), args.incidence, f)


def _cmd_scenario(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    loaded = load_scenario(args.scenario)
    runner = ScenarioRunner(CsvStateTableRepository(), settings, mapper_from_settings(settings.compute))
    request = RunRequest(loaded=loaded, statemap_path=getattr(args, "statemap", None), output_dir=args.out)
    response = runner.run(request, stage=args.stage)
    out.write(render_json(response.summary, settings.output.significant_digits))
    return EXIT_OK


def _cmd_grating_modes(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    cfg = _grating_config(args)
    tolerance = settings.grating.grazing_tolerance
    modes = [ModeDocument(**m.to_dict()) for m in propagating_modes(cfg, tolerance)]
    if args.sweep is None:
        out.write(render_json(modes, settings.output.significant_digits))
        return EXIT_OK
    sweep = [
        {
            "frequency_ghz": f.ghz,
            "propagating_count": sum(1 for m in at_f if m.propagating),
            "modes": [m.to_dict() for m in at_f],
        }
        for f, at_f in sweep_modes(cfg, [Frequency(v) for v in args.sweep], tolerance)
    ]
    out.write(render_json({"modes": [m.model_dump() for m in modes], "sweep": sweep}, settings.output.significant_digits))
    return EXIT_OK


def _cmd_grating_pattern(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    cfg = _grating_config(args)
    grid_deg = math.degrees(args.grid) if args.grid is not None else settings.pattern.grid_deg
    pattern = splitter_pattern(
        cfg,
        args.aperture,
        ElementModel(settings.pattern.element_q),
        grid_deg,
        mapper_from_settings(settings.compute),
        settings.pattern.theta_span_deg,
    )
    text = render_pattern_csv(pattern, digits=settings.output.significant_digits)
    if args.out is None:
        out.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    lobes = lobe_directions(pattern, settings.grating.lobe_threshold_db)
    get_logger(__name__).info("Splitter lobes", lobes_deg=lobes)
    return EXIT_OK


def _cmd_grating_period(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    period = period_for_split(Frequency(args.freq), args.angle, args.incidence)
    out.write(render_json({"period_mm": period * 1e3, "angle_deg": math.degrees(args.angle)}, settings.output.significant_digits))
    return EXIT_OK


def _cmd_unitcell_metrics(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    table = load_state_table(args.table)
    f = Frequency(args.freq)
    center = Frequency(args.center) if args.center is not None else f
    states = sorted(table.states)
    document = {
        "kind": table.kind.value,
        "frequency_ghz": f.ghz,
        "threshold_db": args.threshold,
        "insertion_loss_db": {s: insertion_loss(table, s, f) for s in states},
        "phase_difference_deg": {f"{a}-{b}": phase_difference(table, a, b, f) for a, b in combinations(states, 2)},
        "fractional_bandwidth_pct": {s: fractional_bandwidth(table, s, args.threshold, center) for s in states},
        "source": table.metadata.source,
    }
    out.write(render_json(document, settings.output.significant_digits))
    return EXIT_OK


def _cmd_switch_fom(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    circuit = SwitchCircuit(args.ron, args.con, args.roff, args.coff)
    f = Frequency(args.freq)
    z0 = args.z0 if args.z0 is not None else settings.switch.z0
    il, iso = insertion_loss_isolation(circuit, f, z0)
    z_on = impedance(circuit, SwitchState.ON, f)
    z_off = impedance(circuit, SwitchState.OFF, f)
    document = {
        "cutoff_frequency_thz": cutoff_frequency(circuit).value / 1e12,
        "ron_coff_fs": ron_coff_product(circuit),
        "frequency_ghz": f.ghz,
        "z0_ohm": z0,
        "z_on": {"magnitude_ohm": z_on.magnitude, "phase_deg": z_on.phase_deg},
        "z_off": {"magnitude_ohm": z_off.magnitude, "phase_deg": z_off.phase_deg},
        "insertion_loss_db": il,
        "isolation_db": iso,
    }
    if args.sweep is not None:
        freqs = np.asarray(args.sweep)
        on = impedance_sweep(circuit, SwitchState.ON, freqs)
        off = impedance_sweep(circuit, SwitchState.OFF, freqs)
        il_sweep, iso_sweep = insertion_loss_isolation_sweep(circuit, freqs, z0)
        document["sweep"] = [
            {
                "frequency_ghz": float(fk / 1e9),
                "z_on_ohm": float(abs(a)),
                "z_off_ohm": float(abs(b)),
                "insertion_loss_db": float(il_k),
                "isolation_db": float(iso_k),
            }
            for fk, a, b, il_k, iso_k in zip(freqs, on, off, il_sweep, iso_sweep)
        ]
    out.write(render_json(document, settings.output.significant_digits))
    return EXIT_OK


def _cmd_fspl(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    f = Frequency(args.freq)
    document = {"frequency_ghz": f.ghz, "distance_m": args.dist, "fspl_db": fspl(f, args.dist)}
    if args.pt is not None:
        document["received_power_dbm"] = received_power_dbm(args.pt, args.gt, args.gr, f, args.dist)
    out.write(render_json(document, settings.output.significant_digits))
    return EXIT_OK


def _configure_logging(args: argparse.Namespace, settings: Optional[Settings] = None) -> None:
    overrides = {}
    if settings is not None:
        overrides.update(
            service_name=settings.app_name,
            service_version=settings.app_version,
            environment=settings.environment.value,
        )
    if args.log_level:
        overrides["level"] = args.log_level
    if args.log_format:
        overrides["format"] = args.log_format
    setup_logging(LoggingConfig(**overrides))


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    """Parse ``argv``, dispatch and map failures to exit codes."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(exc.usage)
        err.write(f"risynth: error: {exc}\n")
        return EXIT_VALIDATION
    except SystemExit as exc:
        # --help and --version exit through argparse
        return int(exc.code or 0)

    _configure_logging(args)
    logger = get_logger("risynth.cli")
    try:
        settings = get_settings().with_threads(args.threads)
        _configure_logging(args, settings)
        logger = get_logger("risynth.cli")
        with RunContext(command=args.command):
            return args.handler(args, settings, out)
    except UsageError as exc:
        err.write(f"risynth: error: {exc}\n")
        return EXIT_VALIDATION
    except VALIDATION_ERRORS as exc:
        logger.error("Validation failed", error_type=type(exc).__name__, detail=str(exc))
        err.write(f"risynth: error: {exc}\n")
        return EXIT_VALIDATION
    except (RisynthError, OSError, ValueError, ArithmeticError) as exc:
        logger.exception("Run failed", error_type=type(exc).__name__)
        err.write(f"risynth: runtime error: {exc}\n")
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        logger.exception("Unexpected failure", error_type=type(exc).__name__)
        err.write(f"risynth: runtime error: {type(exc).__name__}: {exc}\n")
        return EXIT_RUNTIME
