"""Command-line front end: configuration, dispatch, CSV and SVG output.

Commands
--------
profile    sample a coupling schedule (kappa1, kappa3, delta_eff)
propagate  run one conversion trace from |1>
sweep      fidelity over a grid of contraction parameters and mismatches
waves      run the nonlinear coupled-wave cascade matched to a schedule
compare    run both simulators and report their discrepancy

Flags override config-file values, which override the documented
defaults.  The config file is flat ``key = value`` text with ``#``
comments.  Exit codes: 0 success, 1 runtime or I/O failure, 2 usage
error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import coupledwave, experiments
from .dynamics import IntegratorSettings
from .errors import ValidationError
from .profiles import (
    GAUSSIAN_APPROX,
    PLAIN,
    TIME_RESCALED,
    PlainGaussianParams,
    coupling_pair,
    detuning_at,
)

_SCHEDULE_ALIASES = {"plain": PLAIN, "tr": TIME_RESCALED, "approx": GAUSSIAN_APPROX}

DEFAULTS = {
    "schedule": None,   # plain, except sweep which defaults to approx
    "kappa0": 1.0,
    "d": 8.0,
    "s": 80.0 / 6.0,
    "L": 80.0,
    "a": None,          # command-dependent, see _resolve
    "delta": None,      # command-dependent, see _resolve
    "steps": 20000,
    "stride": 20,
    "format": "csv",
    "out": None,
    "modulate_detuning": True,
    "pump_amplitude": coupledwave.DEFAULT_PUMP_AMPLITUDE,
    "reference_ratio": coupledwave.DEFAULT_REFERENCE_RATIO,
}

#: Default contraction for single-run shortcut schedules.
DEFAULT_SINGLE_A = 2.0

_COMMANDS = ("profile", "propagate", "sweep", "waves", "compare")
_LIST_COMMANDS = ("sweep",)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved and validated run configuration."""

    command: str
    schedule: str
    kappa0: float
    d: float
    s: float
    L: float
    a_values: tuple
    delta_values: tuple
    steps: int
    stride: int
    out: str
    format: str
    modulate_detuning: bool
    pump_amplitude: float
    reference_ratio: float

    @property
    def base(self) -> PlainGaussianParams:
        return PlainGaussianParams(kappa0=self.kappa0, d=self.d, s=self.s, L=self.L)

    @property
    def settings(self) -> IntegratorSettings:
        return IntegratorSettings(n_steps=self.steps, sample_stride=self.stride)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiashort",
        description="Shortcut-to-adiabaticity frequency-conversion simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"{name} run")
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--out", help="output path (extension added per format)")
        p.add_argument("--format", choices=("csv", "svg", "both"))
        p.add_argument("--schedule", choices=tuple(_SCHEDULE_ALIASES))
        p.add_argument("--a", help="contraction parameter(s), comma-separated for sweep")
        p.add_argument("--kappa0", type=float, help="peak coupling amplitude (1/mm)")
        p.add_argument("--d", type=float, help="Gaussian peak offset (mm)")
        p.add_argument("--s", type=float, help="Gaussian width (mm)")
        p.add_argument("--L", type=float, help="medium length (mm)")
        p.add_argument("--delta", help="phase mismatch(es), comma-separated for sweep")
        p.add_argument("--steps", type=int, help="RK4 step count")
        p.add_argument("--stride", type=int, help="output decimation factor")
        p.add_argument(
            "--constant-mismatch",
            action="store_true",
            default=None,
            help="hold the mismatch constant instead of scaling it by the rescaling rate",
        )
        if name in ("waves", "compare"):
            p.add_argument("--pump-amplitude", type=float, help="input pump envelope (V/m)")
            p.add_argument("--ref-ratio", type=float, help="reference/pump amplitude ratio")
    return parser


_CONFIG_TYPES = {
    "schedule": str,
    "kappa0": float,
    "d": float,
    "s": float,
    "L": float,
    "a": str,
    "delta": str,
    "steps": int,
    "stride": int,
    "format": str,
    "out": str,
    "modulate_detuning": bool,
    "pump_amplitude": float,
    "reference_ratio": float,
}


def _parse_config_file(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_TYPES:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        typ = _CONFIG_TYPES[key]
        try:
            if typ is bool:
                if val.lower() not in ("true", "false"):
                    raise ValueError
                values[key] = val.lower() == "true"
            else:
                values[key] = typ(val)
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: invalid value for {key!r}: {val!r}")
    return values


def _parse_float_list(field: str, text) -> tuple:
    if isinstance(text, (int, float)):
        return (float(text),)
    try:
        values = tuple(float(part) for part in str(text).split(","))
    except ValueError:
        raise ValidationError(f"invalid value for {field!r}: {text!r}")
    if not values:
        raise ValidationError(f"{field} must contain at least one value")
    return values


def parse_config(argv) -> RunConfig:
    """Resolve argv plus optional config file into a validated RunConfig.

    Raises ValidationError for invalid values; argparse exits with code 2
    for unknown flags on its own.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    file_values = _parse_config_file(ns.config) if ns.config else {}

    def pick(key, flag=None):
        flag_val = getattr(ns, flag if flag else key, None)
        if flag_val is not None:
            return flag_val
        if key in file_values:
            return file_values[key]
        return DEFAULTS[key]

    command = ns.command
    schedule = pick("schedule")
    if schedule is None:
        # The fidelity scan only makes sense for a contracted schedule.
        schedule = "approx" if command == "sweep" else "plain"
    if schedule not in _SCHEDULE_ALIASES:
        raise ValidationError(f"invalid value for 'schedule': {schedule!r}")
    kind = _SCHEDULE_ALIASES[schedule]

    kappa0 = float(pick("kappa0"))
    fmt = pick("format")
    if fmt not in ("csv", "svg", "both"):
        raise ValidationError(f"invalid value for 'format': {fmt!r}")

    raw_a = pick("a")
    if raw_a is None:
        a_values = (
            experiments.DEFAULT_SWEEP_A
            if command in _LIST_COMMANDS
            else (DEFAULT_SINGLE_A if kind != PLAIN else 1.0,)
        )
    else:
        a_values = _parse_float_list("a", raw_a)

    raw_delta = pick("delta")
    if raw_delta is None:
        delta_values = (0.0, kappa0) if command in _LIST_COMMANDS else (0.0,)
    else:
        delta_values = _parse_float_list("delta", raw_delta)

    if command not in _LIST_COMMANDS:
        if len(a_values) != 1:
            raise ValidationError(f"'{command}' expects a single value for 'a'")
        if len(delta_values) != 1:
            raise ValidationError(f"'{command}' expects a single value for 'delta'")
    for a in a_values:
        if a < 1.0:
            raise ValidationError(f"invalid value for 'a': {a} (must be >= 1)")

    modulate = pick("modulate_detuning")
    if getattr(ns, "constant_mismatch", None):
        modulate = False

    steps = int(pick("steps"))
    stride = int(pick("stride"))
    out = pick("out")
    if out is None:
        out = command

    config = RunConfig(
        command=command,
        schedule=kind,
        kappa0=kappa0,
        d=float(pick("d")),
        s=float(pick("s")),
        L=float(pick("L")),
        a_values=a_values,
        delta_values=delta_values,
        steps=steps,
        stride=stride,
        out=str(out),
        format=fmt,
        modulate_detuning=bool(modulate),
        pump_amplitude=float(pick("pump_amplitude", "pump_amplitude")),
        reference_ratio=float(pick("reference_ratio", "ref_ratio")),
    )
    # Construct the parameter objects now so precondition violations
    # surface as usage errors before any work starts.
    config.base
    config.settings
    return config


def _format_value(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit_csv(header, columns, path) -> None:
    """Write columns as a UTF-8, LF-terminated CSV with 17-digit floats."""
    columns = [np.asarray(c) for c in columns]
    if len(columns) != len(header):
        raise ValidationError("header and column counts differ")
    if not columns or columns[0].size == 0:
        raise ValidationError("refusing to write an empty table")
    n = columns[0].size
    if any(c.size != n for c in columns):
        raise ValidationError("columns must have equal length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(_format_value(c[i]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


_SVG_WIDTH = 800
_SVG_HEIGHT = 500
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 160
_MARGIN_TOP = 30
_MARGIN_BOTTOM = 50
_SERIES_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _ticks(lo: float, hi: float, count: int = 6):
    if hi == lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, count)


def emit_svg(x, series, path, x_label="z_mm") -> None:
    """Write a standalone SVG line plot (fixed 800x500 canvas).

    ``series`` maps a label to a y-array; every series needs at least two
    points and shares the x-axis.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValidationError("svg output requires at least two data points per series")
    for label, ys in series.items():
        if np.asarray(ys).size != x.size:
            raise ValidationError(f"series {label!r} length does not match x")

    finite_ys = np.concatenate(
        [np.asarray(ys, dtype=float)[np.isfinite(ys)] for ys in series.values()]
    )
    if finite_ys.size == 0:
        raise ValidationError("svg output requires finite data")
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(finite_ys.min()), float(finite_ys.max())
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    if x_hi == x_lo:
        raise ValidationError("svg output requires a non-degenerate x range")

    plot_w = _SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(v):
        return _MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return _MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_WIDTH}" '
        f'height="{_SVG_HEIGHT}" viewBox="0 0 {_SVG_WIDTH} {_SVG_HEIGHT}">',
        f'<rect width="{_SVG_WIDTH}" height="{_SVG_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_MARGIN_TOP + plot_h}" x2="{px:.2f}" '
            f'y2="{_MARGIN_TOP + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_MARGIN_TOP + plot_h + 20}" '
            f'font-size="11" text-anchor="middle">{tx:.4g}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(
            f'<line x1="{_MARGIN_LEFT - 5}" y1="{py:.2f}" x2="{_MARGIN_LEFT}" '
            f'y2="{py:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{py + 4:.2f}" '
            f'font-size="11" text-anchor="end">{ty:.4g}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_LEFT + plot_w / 2}" y="{_SVG_HEIGHT - 10}" '
        f'font-size="12" text-anchor="middle">{x_label}</text>'
    )

    for idx, (label, ys) in enumerate(series.items()):
        ys = np.asarray(ys, dtype=float)
        color = _SERIES_COLORS[idx % len(_SERIES_COLORS)]
        mask = np.isfinite(ys)
        pts = " ".join(
            f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x[mask], ys[mask])
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_TOP + 15 + 16 * idx
        lx = _MARGIN_LEFT + plot_w + 10
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(f'<text x="{lx + 22}" y="{ly}" font-size="11">{label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")


def _output_paths(config: RunConfig) -> dict:
    base = config.out
    for suffix in (".csv", ".svg"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    paths = {}
    if config.format in ("csv", "both"):
        paths["csv"] = base + ".csv"
    if config.format in ("svg", "both"):
        paths["svg"] = base + ".svg"
    return paths


def _emit(config: RunConfig, header, columns, svg_x, svg_series, x_label) -> list:
    written = []
    paths = _output_paths(config)
    if "csv" in paths:
        emit_csv(header, columns, paths["csv"])
        written.append(paths["csv"])
    if "svg" in paths:
        emit_svg(svg_x, svg_series, paths["svg"], x_label=x_label)
        written.append(paths["svg"])
    return written


def _single_schedule(config: RunConfig):
    return experiments.make_schedule(
        config.schedule,
        config.base,
        a=config.a_values[0],
        delta0=config.delta_values[0],
        modulate_detuning=config.modulate_detuning,
    )


def _run_profile(config: RunConfig) -> list:
    sched = _single_schedule(config)
    n_samples = config.steps // config.stride
    z = np.linspace(0.0, sched.length, n_samples + 1)
    k1, k3 = coupling_pair(z, sched)
    de = np.asarray(detuning_at(z, sched))
    header = ["z_mm", "kappa1", "kappa3", "delta_eff"]
    cols = [z, k1, k3, de]
    series = {"kappa1": k1, "kappa3": k3, "delta_eff": de}
    return _emit(config, header, cols, z, series, "z_mm")


def _run_propagate(config: RunConfig) -> list:
    sched = _single_schedule(config)
    trace = experiments.run_trace(sched, config.settings)
    header, cols = trace.table()
    pops = trace.result.populations
    series = {"pop1": pops[:, 0], "pop2": pops[:, 1], "pop3": pops[:, 2]}
    written = _emit(config, header, cols, trace.z_grid, series, "z_mm")
    print(f"final fidelity: {trace.result.final_fidelity:.6f}")
    return written


def _run_sweep(config: RunConfig) -> list:
    spec = experiments.SweepSpec(
        a_values=config.a_values,
        delta_values=config.delta_values,
        schedule_kind=config.schedule,
        base=config.base,
        settings=config.settings,
        modulate_detuning=config.modulate_detuning,
    )
    result = experiments.sweep_contraction(spec)
    header, cols = result.table()
    a_sorted = sorted(set(r.a for r in result.rows))
    series = {}
    for delta in sorted(set(r.delta for r in result.rows)):
        fids = [r.fidelity for r in result.rows if r.delta == delta]
        series[f"fidelity delta={delta:g}"] = np.array(fids)
    written = _emit(config, header, cols, np.array(a_sorted), series, "a")
    print(f"minimum fidelity: {min(r.fidelity for r in result.rows):.6f}")
    return written


def _run_waves(config: RunConfig) -> list:
    sched = _single_schedule(config)
    pump = config.pump_amplitude
    ref = config.reference_ratio * pump
    params = coupledwave.matched_wave_parameters(sched, pump, ref)
    traj = coupledwave.propagate_waves(
        coupledwave.WaveState(pump, 0.0, 0.0, ref), params, config.settings
    )
    n = traj.fluxes
    scale = n[0, 0]
    header = ["z_mm", "flux_pump", "flux_sh", "flux_plus", "flux_minus"]
    cols = [traj.z_grid, n[:, 0] / scale, n[:, 1] / scale, n[:, 2] / scale, n[:, 3] / scale]
    series = {
        "flux_pump": cols[1],
        "flux_sh": cols[2],
        "flux_plus": cols[3],
    }
    written = _emit(config, header, cols, traj.z_grid, series, "z_mm")
    print(f"flux conservation drift: {traj.total_flux_drift:.3e}")
    return written


def _run_compare(config: RunConfig) -> list:
    sched = _single_schedule(config)
    pump = config.pump_amplitude
    ref = config.reference_ratio * pump
    params = coupledwave.matched_wave_parameters(sched, pump, ref)
    report = coupledwave.compare_models(
        sched, params, config.settings, pump_amplitude=pump, reference_amplitude=ref
    )
    header = ["z_mm", "pop1", "pop2", "pop3", "wave_frac1", "wave_frac2", "wave_frac3"]
    cols = [
        report.z_grid,
        report.model_populations[:, 0],
        report.model_populations[:, 1],
        report.model_populations[:, 2],
        report.wave_fractions[:, 0],
        report.wave_fractions[:, 1],
        report.wave_fractions[:, 2],
    ]
    series = {
        "pop3": report.model_populations[:, 2],
        "wave_frac3": report.wave_fractions[:, 2],
        "pop2": report.model_populations[:, 1],
        "wave_frac2": report.wave_fractions[:, 1],
    }
    written = _emit(config, header, cols, report.z_grid, series, "z_mm")
    print(f"model conversion: {report.model_conversion:.6f}")
    print(f"wave conversion: {report.wave_conversion:.6f}")
    print(f"max pointwise discrepancy: {report.max_discrepancy:.6f}")
    return written


_RUNNERS = {
    "profile": _run_profile,
    "propagate": _run_propagate,
    "sweep": _run_sweep,
    "waves": _run_waves,
    "compare": _run_compare,
}


def main(argv=None) -> int:
    """Entry point; returns the process exit code instead of raising."""
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = parse_config(list(argv))
    except SystemExit as exc:
        # argparse already printed a usage message
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        written = _RUNNERS[config.command](config)
    except (ValidationError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
