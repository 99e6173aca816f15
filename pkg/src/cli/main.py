"""
Command-line front end.

    python -m src.cli spectrum --b 100 --delta 30 --convention canonical
    python -m src.cli store --config configs/storage.cfg --out runs/store
    python -m src.cli sweep --b 1e3,1e4 --delta 300,1000,3000 --jobs 4
    python -m src.cli estimate --preset sr
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from ..config import get_config
from ..exceptions import (
    ChosError, ConfigError, ConsistencyError, DivergenceError, MetricsError,
    SingularConfigurationError, ValidationError,
)
from ..mb_solver import SimResult, run_storage, simulate, storage_t_max
from ..metrics import fidelity, fidelity_max_over_delay, measured_delay, shape_overlap
from ..model import Constant
from ..spectral import (
    Convention, ExperimentalSetup, experimental_estimate, group_delay,
    susceptibility,
)
from ..sweep import (
    GridPolicy, StorageTemplate, fit_fidelity_curve, heatmap, optimize_curve,
)
from .run_config import RunConfig, dump_run_config, load_run_config
from .writers import csv_text, fmt, json_text, read_curve_csv, write_atomic

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4

DEFAULT_LADDER = (1e2, 3e2, 1e3, 3e3, 1e4)
FULL_SCALE_B = 6e4

# Tail margin after the delayed pulse, in pulse widths
_TAIL_MARGIN = 8.0


def _float_list(text: Optional[str]) -> Optional[list[float]]:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"not a comma-separated number list: '{text}'") from e


def _single(text: Optional[str], flag: str) -> Optional[float]:
    values = _float_list(text)
    if values is None:
        return None
    if len(values) != 1:
        raise ConfigError(f"{flag} takes a single value for this subcommand")
    return values[0]


def build_config(args: argparse.Namespace, lists: bool = False) -> RunConfig:
    """Configuration file (if any) with command-line flags applied on top."""
    config = load_run_config(args.config) if args.config else RunConfig()
    overrides: dict[str, dict[str, Any]] = {
        "medium": {},
        "schedule": {
            "t_off": args.t_off,
            "t_on": args.t_on,
            "ramp_time": args.ramp,
        },
        "pulse": {"sigma_tau": args.sigma_tau},
        "grid": {"snapshot_stride": args.snapshots},
        "run": {"variant": args.variant, "convention": args.convention},
        "sweep": {},
    }
    if lists:
        overrides["sweep"] = {
            "b_list": _float_list(args.b),
            "delta_list": _float_list(args.delta),
        }
    else:
        overrides["medium"]["optical_depth"] = _single(args.b, "--b")
        overrides["schedule"]["delta0"] = _single(args.delta, "--delta")
    return config.with_overrides(overrides)


def _out_dir(args: argparse.Namespace) -> Path:
    return Path(args.out or get_config().out_dir)


def _timeseries_csv(result: SimResult, comments: Sequence[str]) -> str:
    rows = zip(
        result.t_grid,
        np.abs(result.e_in) ** 2,
        np.abs(result.e_out) ** 2,
        result.delta_trace,
    )
    return csv_text(("t", "e_in_sq", "e_out_sq", "delta"), rows, comments)


def _snapshots_csv(result: SimResult) -> str:
    snaps = result.snapshots
    names = list(snaps.data)
    columns = ["t", "z"]
    for name in names:
        columns += [f"re_{name}", f"im_{name}"]

    def rows():
        for i, t in enumerate(snaps.times):
            for j, z in enumerate(result.z_grid):
                row = [t, z]
                for name in names:
                    v = snaps.data[name][i, j]
                    row += [v.real, v.imag]
                yield row

    return csv_text(columns, rows())


def _energies(result: SimResult) -> tuple[float, float]:
    t = result.t_grid
    return (
        float(trapezoid(np.abs(result.e_in) ** 2, t)),
        float(trapezoid(np.abs(result.e_out) ** 2, t)),
    )


def _write_run(out: Path, config: RunConfig, result: SimResult, summary: dict, args) -> None:
    comments = [f"variant={result.variant.value}", f"b={fmt(result.params.b)}"]
    write_atomic(out / "timeseries.csv", _timeseries_csv(result, comments))
    if args.snapshots is not None and result.snapshots is not None:
        write_atomic(out / "snapshots.csv", _snapshots_csv(result))
    write_atomic(out / "summary.json", json_text(summary))
    write_atomic(out / "run.cfg", dump_run_config(config))


def _summary(config: RunConfig, result: SimResult, **extra) -> dict:
    energy_in, energy_out = _energies(result)
    try:
        delay = measured_delay(result)
    except MetricsError:
        delay = None
    summary = {
        "delay": delay,
        "energy_in": energy_in,
        "energy_out": energy_out,
        "parameters": config.model_dump(),
        "diagnostics": {
            "steps": result.diagnostics.steps,
            "max_residual": result.diagnostics.max_residual,
            "entered_fraction": result.diagnostics.entered_fraction,
        },
    }
    summary.update(extra)
    return summary


def cmd_spectrum(args: argparse.Namespace) -> int:
    config = build_config(args)
    medium = config.to_medium()
    delta = config.schedule.delta0
    omega_max = args.omega_max or max(3.0 * delta, 10.0)
    omega = np.linspace(-omega_max, omega_max, args.points)
    chi = susceptibility(omega, medium, delta, config.convention)
    transmission = np.exp(2.0 * chi.real)

    comments = [
        f"convention={config.convention.value}",
        f"b={fmt(medium.b)}",
        f"delta_over_gamma={fmt(delta)}",
        f"decay_scale={fmt(medium.decay_scale)}",
    ]
    text = csv_text(
        ("omega_over_gamma", "re_chi", "im_chi", "transmission"),
        zip(omega, chi.real, chi.imag, transmission),
        comments,
    )
    if args.out is None:
        sys.stdout.write(text)
    else:
        out = _out_dir(args)
        write_atomic(out / "spectrum.csv", text)
        write_atomic(out / "run.cfg", dump_run_config(config))
    return EXIT_OK


def cmd_slowlight(args: argparse.Namespace) -> int:
    config = build_config(args).with_overrides({"schedule": {"kind": "constant"}})
    medium = config.to_medium()
    pulse = config.to_pulse()
    schedule = Constant(config.schedule.delta0)
    delay = 0.0
    if schedule.delta0 > 0:
        delay = max(group_delay(medium, schedule.delta0, Convention.CANONICAL), 0.0)
    t_max = pulse.t_center + delay + _TAIL_MARGIN * pulse.sigma_tau
    grid = config.to_grid(t_max, schedule, pulse)

    result = simulate(
        medium, schedule, pulse, grid, config.variant,
        snapshots=args.snapshots is not None,
    )
    report = fidelity(result)
    summary = _summary(
        config, result,
        fidelity=report.fidelity,
        reference_delay=report.reference_delay,
        group_delay=delay,
    )
    if summary["delay"] is not None:
        summary["shape_overlap"] = shape_overlap(result, summary["delay"])
    _write_run(_out_dir(args), config, result, summary, args)
    return EXIT_OK


def cmd_store(args: argparse.Namespace) -> int:
    config = build_config(args)
    s = config.schedule
    if s.t_off is None or s.t_on is None:
        raise ConfigError("store needs t_off and t_on (config [schedule] or --t-off/--t-on)")
    if not math.isfinite(s.t_on):
        raise ConfigError("store needs a finite t_on")
    kind = "ramped" if s.ramp_time > 0 else "step"
    config = config.with_overrides({"schedule": {"kind": kind}})
    s = config.schedule

    medium = config.to_medium()
    pulse = config.to_pulse()
    schedule = config.to_schedule()
    grid = config.to_grid(storage_t_max(medium, s.delta0, s.t_on, pulse), schedule, pulse)

    result = run_storage(
        medium, s.delta0, s.t_off, s.t_on, pulse, grid, config.variant,
        ramp_time=s.ramp_time, snapshots=args.snapshots is not None,
    )
    report = fidelity(result)
    hold = s.t_on - s.t_off
    best = fidelity_max_over_delay(
        result, tau_range=(hold, max(hold, result.t_grid[-1] - pulse.t_center)),
    )
    summary = _summary(
        config, result,
        fidelity=report.fidelity,
        fidelity_sq=report.fidelity_sq,
        reference_delay=report.reference_delay,
        fidelity_optimized=best.fidelity,
        optimized_delay=best.reference_delay,
        warnings=best.warnings,
    )
    _write_run(_out_dir(args), config, result, summary, args)
    return EXIT_OK


def _template(config: RunConfig) -> StorageTemplate:
    pulse = config.to_pulse()
    s = config.schedule
    if s.t_off is None or s.t_on is None:
        return StorageTemplate(ramp_time=s.ramp_time).scaled(pulse.sigma_tau)
    return StorageTemplate(
        t_center=pulse.t_center, t_off=s.t_off, t_on=s.t_on,
        sigma_tau_ref=pulse.sigma_tau, ramp_time=s.ramp_time,
    )


def _policy(config: RunConfig) -> GridPolicy:
    return GridPolicy(nz=config.grid.nz)


def cmd_sweep(args: argparse.Namespace) -> int:
    config = build_config(args, lists=True)
    if not config.sweep.b_list or not config.sweep.delta_list:
        raise ConfigError("sweep needs --b and --delta lists (or a [sweep] section)")
    result = heatmap(
        config.sweep.b_list,
        config.sweep.delta_list,
        pulse=config.to_pulse(),
        template=_template(config),
        policy=_policy(config),
        medium=config.to_medium(),
        jobs=args.jobs,
        variant=config.variant,
    )
    rows = (
        (r.b, r.delta_over_gamma, r.fidelity_mod, r.fidelity_mod_sq, r.delay, r.error or "")
        for r in result.rows
    )
    out = _out_dir(args)
    write_atomic(out / "heatmap.csv", csv_text(
        ("b", "delta_over_gamma", "fidelity_mod", "fidelity_mod_sq", "delay", "error"),
        rows,
        [f"variant={result.variant.value}", f"sigma_tau={fmt(result.pulse.sigma_tau)}"],
    ))
    write_atomic(out / "sweep.json", json_text({
        "metadata": result.metadata(),
        "errors": result.errors,
    }))
    write_atomic(out / "run.cfg", dump_run_config(config))
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    config = build_config(args, lists=True)
    b_list = list(config.sweep.b_list or DEFAULT_LADDER)
    if args.full_scale and FULL_SCALE_B not in b_list:
        b_list.append(FULL_SCALE_B)
    config = config.with_overrides({"sweep": {"b_list": b_list}})
    template = _template(config)

    curve = optimize_curve(
        b_list, pulse=config.to_pulse(), template=template,
        policy=_policy(config), medium=config.to_medium(),
    )
    fit = None
    fit_error = None
    try:
        report = fit_fidelity_curve(curve, t_s=template.hold)
        fit = {
            "c0": report.c0, "c1": report.c1,
            "rms_residual": report.rms_residual, "t_s": report.t_s,
        }
    except ChosError as e:
        fit_error = str(e)
        logger.warning(f"curve fit skipped: {e}")

    out = _out_dir(args)
    write_atomic(out / "curve.csv", csv_text(
        ("b", "best_delta", "best_fidelity"),
        ((r.b, r.best_delta, r.best_fidelity) for r in curve.rows),
    ))
    write_atomic(out / "fit.json", json_text({
        "fit": fit,
        "fit_error": fit_error,
        "monotone": curve.is_monotone(),
        "settings": curve.settings,
    }))
    write_atomic(out / "run.cfg", dump_run_config(config))
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    curve = None
    if args.curve:
        try:
            curve = read_curve_csv(Path(args.curve))
        except (OSError, KeyError, ValueError) as e:
            raise ConfigError(f"cannot read curve {args.curve}: {e}") from e

    if args.preset:
        setup = args.preset
    else:
        config = build_config(args)
        m = config.medium
        setup = ExperimentalSetup(
            name="custom", gamma=m.gamma, length=m.length,
            delta_over_gamma=config.schedule.delta0, optical_depth=m.optical_depth,
        )
    report = experimental_estimate(setup, curve=curve)
    text = json_text(report.to_dict())
    sys.stdout.write(text)
    if args.out is not None:
        write_atomic(_out_dir(args) / "estimate.json", text)
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--out", help="Output directory (default: CHOS_OUT_DIR or runs)")
    common.add_argument("--b", help="Optical depth (comma list for sweep/optimize)")
    common.add_argument("--delta", help="Splitting delta/gamma (comma list for sweep)")
    common.add_argument("--sigma-tau", type=float, dest="sigma_tau")
    common.add_argument("--t-off", type=float, dest="t_off")
    common.add_argument("--t-on", type=float, dest="t_on")
    common.add_argument("--ramp", type=float, help="Switching ramp duration")
    common.add_argument("--variant", choices=["zeeman", "stark", "full"])
    common.add_argument("--convention", choices=["paper", "canonical"])
    common.add_argument("--jobs", type=int, help="Worker processes for sweeps")
    common.add_argument("--snapshots", type=int, metavar="STRIDE",
                        help="Write space-time snapshots every STRIDE steps")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="chos", description="Controlled homogeneous splitting memory simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    commands: list[tuple[str, str, Callable[[argparse.Namespace], int]]] = [
        ("spectrum", "Susceptibility and transmission curves", cmd_spectrum),
        ("slowlight", "Propagation at constant splitting", cmd_slowlight),
        ("store", "Storage and retrieval run", cmd_store),
        ("sweep", "Fidelity heatmap over b and delta", cmd_sweep),
        ("optimize", "Optimized fidelity versus b, with fit", cmd_optimize),
        ("estimate", "Experimental feasibility estimates", cmd_estimate),
    ]
    parsers = {}
    for name, help_text, handler in commands:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        parsers[name] = p

    parsers["spectrum"].add_argument("--omega-max", type=float, dest="omega_max")
    parsers["spectrum"].add_argument("--points", type=int, default=1001)
    parsers["optimize"].add_argument("--full-scale", action="store_true", dest="full_scale",
                                     help=f"Add b={FULL_SCALE_B:g} to the ladder")
    parsers["estimate"].add_argument("--preset", choices=["sr", "pryso"])
    parsers["estimate"].add_argument("--curve", help="Curve CSV written by optimize")
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    try:
        return args.handler(args)
    except (ConfigError, ValidationError) as e:
        logger.error(f"configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, ConsistencyError, SingularConfigurationError) as e:
        logger.error(f"solver error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except ChosError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    config = get_config()
    logging.basicConfig(
        level=config.log_level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    sys.exit(dispatch())
