"""Command line interface: point evaluation, sweeps, figure presets and the
self-test battery, with CSV and SVG emission.

Exit codes: 0 ok, 2 configuration error, 3 unstable point (``point`` only),
4 output I/O error, 5 self-test failure.
"""

import argparse
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import __version__
from .checks import run_self_checks
from .lyapunov import check_stability, solve_lyapunov
from .measures import correlation_set, extract_two_mode
from .model import PhysicalParams, build_system_matrices, derive_params
from .svgplot import heatmap_svg, lineplot_svg
from .sweep import (
    FIGURE_PRESET_IDS,
    MEASURE_FIELDS,
    SweepAxis,
    SweepSpec,
    figure_preset,
    run_sweep,
)

TWO_PI = 2.0 * math.pi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3
EXIT_IO = 4
EXIT_SELFTEST = 5


class ConfigError(ValueError):
    pass


#: Published configuration keys with reference defaults.  Frequencies marked
#: ``_2pi_MHz`` are entered as nu/2pi in MHz and converted to rad/s; detunings
#: are in units of the second mirror's rotation frequency.
CONFIG_DEFAULTS = {
    "radius_um": 10.0,
    "oam_l": 100,
    "power_mW": 50.0,
    "wavelength_nm": 810.0,
    "finesse": 5000.0,
    "quality_factor": 2.0e6,
    "cavity_length_mm": 1.0,
    "mass_ng": 40.0,
    "omega_phi1_2pi_MHz": 10.0,
    "omega_phi2_2pi_MHz": 10.0,
    "gamma_m_2pi_MHz": 1.0,
    "g_ma_2pi_MHz": 3.2,
    "delta_m_over_wphi": 1.0,
    "delta_a_over_wphi": 1.0,
    "temperature_K": 10.0,
    "detuning_mode": "effective",
}


def params_from_config(cfg: dict) -> PhysicalParams:
    """Build SI/rad-s PhysicalParams from a resolved configuration dict."""
    w1 = TWO_PI * cfg["omega_phi1_2pi_MHz"] * 1e6
    w2 = TWO_PI * cfg["omega_phi2_2pi_MHz"] * 1e6
    try:
        return PhysicalParams(
            mirror_radius=cfg["radius_um"] * 1e-6,
            oam_l=int(cfg["oam_l"]),
            input_power=cfg["power_mW"] * 1e-3,
            wavelength=cfg["wavelength_nm"] * 1e-9,
            finesse=cfg["finesse"],
            quality_factor=cfg["quality_factor"],
            cavity_length=cfg["cavity_length_mm"] * 1e-3,
            mirror_mass=cfg["mass_ng"] * 1e-12,
            omega_phi=(w1, w2),
            gamma_m=TWO_PI * cfg["gamma_m_2pi_MHz"] * 1e6,
            g_ma=TWO_PI * cfg["g_ma_2pi_MHz"] * 1e6,
            delta_a=cfg["delta_a_over_wphi"] * w2,
            delta_m=cfg["delta_m_over_wphi"] * w2,
            temperature=cfg["temperature_K"],
            detuning_mode=cfg["detuning_mode"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def apply_overrides(base: PhysicalParams, explicit: dict) -> PhysicalParams:
    """Apply explicitly-set configuration keys on top of existing params."""
    p = base
    w2 = p.omega_phi[1]
    for key, value in explicit.items():
        if key == "radius_um":
            p = p.replace(mirror_radius=value * 1e-6)
        elif key == "oam_l":
            p = p.replace(oam_l=int(value))
        elif key == "power_mW":
            p = p.replace(input_power=value * 1e-3)
        elif key == "wavelength_nm":
            p = p.replace(wavelength=value * 1e-9)
        elif key == "finesse":
            p = p.replace(finesse=value)
        elif key == "quality_factor":
            p = p.replace(quality_factor=value)
        elif key == "cavity_length_mm":
            p = p.replace(cavity_length=value * 1e-3)
        elif key == "mass_ng":
            p = p.replace(mirror_mass=value * 1e-12)
        elif key == "omega_phi1_2pi_MHz":
            p = p.replace(omega_phi=(TWO_PI * value * 1e6, p.omega_phi[1]))
        elif key == "omega_phi2_2pi_MHz":
            p = p.replace(omega_phi=(p.omega_phi[0], TWO_PI * value * 1e6))
            w2 = p.omega_phi[1]
        elif key == "gamma_m_2pi_MHz":
            p = p.replace(gamma_m=TWO_PI * value * 1e6)
        elif key == "g_ma_2pi_MHz":
            p = p.replace(g_ma=TWO_PI * value * 1e6)
        elif key == "delta_a_over_wphi":
            p = p.replace(delta_a=value * w2)
        elif key == "delta_m_over_wphi":
            p = p.replace(delta_m=value * w2)
        elif key == "temperature_K":
            p = p.replace(temperature=value)
        elif key == "detuning_mode":
            p = p.replace(detuning_mode=value)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return p


def _coerce(key: str, raw):
    if key == "detuning_mode":
        if raw not in ("effective", "bare_fixed_point"):
            raise ConfigError(f"invalid detuning_mode {raw!r}")
        return raw
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"value for {key!r} is not a number: {raw!r}") from exc


def load_config(path: str | None, sets: list) -> tuple:
    """Resolve the configuration: defaults, then file, then --set overrides.

    Returns ``(full_config, explicit_keys_dict, sweep_table)``.
    """
    explicit = {}
    sweep_table = None
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config file: {exc}") from exc
        sweep_table = data.pop("sweep", None)
        for key, raw in data.items():
            if key not in CONFIG_DEFAULTS:
                raise ConfigError(f"unknown configuration key {key!r}")
            explicit[key] = _coerce(key, raw)
    for item in sets or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        if key not in CONFIG_DEFAULTS:
            raise ConfigError(f"unknown configuration key {key!r}")
        explicit[key] = _coerce(key, raw.strip())
    full = {**CONFIG_DEFAULTS, **explicit}
    return full, explicit, sweep_table


def sweep_spec_from_table(base: PhysicalParams, table: dict) -> SweepSpec:
    """Build a SweepSpec from a [sweep] config table."""
    def axis(prefix):
        name = table.get(prefix)
        if name is None:
            return None
        if f"{prefix}_values" in table:
            return SweepAxis(name, tuple(float(v)
                                         for v in table[f"{prefix}_values"]))
        rng = table.get(f"{prefix}_range")
        if rng is None or len(rng) != 2:
            raise ConfigError(f"{prefix}_range = [lo, hi] is required "
                              f"when {prefix}_values is absent")
        count = int(table.get(f"{prefix}_count", 101))
        return SweepAxis.linspace(name, float(rng[0]), float(rng[1]), count)

    axis1 = axis("axis1")
    if axis1 is None:
        raise ConfigError("sweep table needs at least axis1")
    measures = tuple(table.get("measures", ("E", "S12", "S21", "Ds", "GGD")))
    try:
        return SweepSpec(base=base, axis1=axis1, axis2=axis("axis2"),
                         measures=measures)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output writers


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def result_to_csv(result, include_timestamp: bool = True) -> str:
    """Locale-independent CSV with a ``#`` metadata block."""
    spec = result.spec
    lines = [f"# mirrormag {__version__} sweep output"]
    if include_timestamp:
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"# generated = {stamp}")
    for key, value in result.metadata.items():
        lines.append(f"# {key} = {value}")
    coords = [spec.axis1.name] + ([spec.axis2.name] if spec.axis2 else [])
    swept_gma = "g_ma_2pi_MHz" in coords
    header = list(coords)
    if swept_gma:
        header.append("g_ma_over_G")
    header += list(spec.measures) + ["stable"]
    lines.append(",".join(header))
    for rec in result.records:
        row = [_fmt17(c) for c in rec.coords]
        if swept_gma:
            row.append(_fmt17(rec.g_ma_over_G)
                       if math.isfinite(rec.g_ma_over_G) else "")
        for m in spec.measures:
            if rec.correlations is None:
                row.append("")
            else:
                row.append(_fmt17(getattr(rec.correlations,
                                          MEASURE_FIELDS[m])))
        row.append("1" if rec.stable else "0")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


AXIS_LABELS = {
    "delta_m_over_wphi": "delta_m / omega_phi",
    "delta_a_over_wphi": "delta_a / omega_phi",
    "temperature_K": "temperature (K)",
    "mass_ng": "mirror mass (ng)",
    "oam_l": "topological charge l",
    "g_ma_2pi_MHz": "g_ma / 2pi (MHz)",
    "wphi1_over_wphi2": "omega_phi1 / omega_phi2",
    "power_mW": "drive power (mW)",
    "finesse": "finesse",
}

MEASURE_LABELS = {
    "E": "entanglement E",
    "S12": "steering S_1->2",
    "S21": "steering S_2->1",
    "Ds": "steering asymmetry",
    "GGD": "geometric discord",
}


def result_to_svg(result, title: str = "") -> str:
    """Render a sweep as a heatmap (dense 2-D) or multi-series line plot."""
    spec = result.spec
    if spec.axis2 is not None and len(spec.axis1.values) > 8:
        measure = spec.measures[0]
        return heatmap_svg(
            spec.axis1.values, spec.axis2.values,
            result.measure_grid(measure),
            xlabel=AXIS_LABELS.get(spec.axis1.name, spec.axis1.name),
            ylabel=AXIS_LABELS.get(spec.axis2.name, spec.axis2.name),
            title=title, legend=MEASURE_LABELS.get(measure, measure),
        )
    if spec.axis2 is not None:
        # few-valued first axis: one series per axis1 value
        measure = spec.measures[0]
        grid = result.measure_grid(measure)
        series = {
            f"{spec.axis1.name}={_trim(v)}": grid[i]
            for i, v in enumerate(spec.axis1.values)
        }
        return lineplot_svg(
            spec.axis2.values, series,
            xlabel=AXIS_LABELS.get(spec.axis2.name, spec.axis2.name),
            ylabel=MEASURE_LABELS.get(measure, measure), title=title,
        )
    series = {
        MEASURE_LABELS.get(m, m): result.measure_grid(m)
        for m in spec.measures
    }
    hlines = ((math.log(2.0), "ln 2"),) if "Ds" in spec.measures else ()
    return lineplot_svg(
        spec.axis1.values, series,
        xlabel=AXIS_LABELS.get(spec.axis1.name, spec.axis1.name),
        ylabel="measure value", title=title, hlines=hlines,
    )


def _trim(v: float) -> str:
    return f"{v:g}"


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO) from exc


# ---------------------------------------------------------------------------
# commands


def _print_aligned(pairs):
    width = max(len(k) for k, _ in pairs)
    for key, value in pairs:
        print(f"  {key.ljust(width)}  {value}")


def _fmt_pair(values, fmt="{:.6g}"):
    return "(" + ", ".join(fmt.format(v) for v in values) + ")"


def cmd_point(args) -> int:
    full, _, _ = load_config(args.config, args.set)
    params = params_from_config(full)
    derived = derive_params(params)
    mats = build_system_matrices(derived, params)
    report = check_stability(mats.drift)

    print("derived parameters")
    _print_aligned([
        ("inertia (kg m^2)", _fmt_pair(derived.inertia, "{:.6e}")),
        ("opto_coupling g (rad/s)", _fmt_pair(derived.opto_coupling)),
        ("drive_amplitude eps (1/s)", _fmt_pair(derived.drive_amplitude, "{:.6e}")),
        ("cavity_decay gamma_a (rad/s)", _fmt_pair(derived.cavity_decay)),
        ("mirror_damping gamma_phi (rad/s)", _fmt_pair(derived.mirror_damping)),
        ("|steady_field| |a_s|", _fmt_pair([abs(a) for a in derived.steady_field])),
        ("steady_magnon |m_s|", f"{abs(derived.steady_magnon):.6g}"),
        ("steady_angle phi_s", _fmt_pair(derived.steady_angle)),
        ("eff_detuning Delta (rad/s)", _fmt_pair(derived.eff_detuning)),
        ("enhanced_coupling G (rad/s)", _fmt_pair(derived.enhanced_coupling)),
        ("occupation nbar", _fmt_pair(derived.occupation)),
        ("omega_eff (rad/s)", _fmt_pair(derived.omega_eff)),
    ])
    print("stability")
    _print_aligned([
        ("stable", str(report.stable)),
        ("spectral_abscissa (rad/s)", f"{report.spectral_abscissa:.6e}"),
    ])
    if not report.stable:
        print("unstable operating point: correlation values withheld")
        return EXIT_UNSTABLE

    cm_full = solve_lyapunov(mats.drift, mats.diffusion, _check=False)
    corr = correlation_set(extract_two_mode(cm_full))
    print("mirror-mirror correlations")
    rows = [
        ("log_negativity E", f"{corr.log_negativity:.12g}"),
        ("steering S_1->2", f"{corr.steering_12:.12g}"),
        ("steering S_2->1", f"{corr.steering_21:.12g}"),
        ("steering asymmetry", f"{corr.steering_asymmetry:.12g}"),
        ("geometric discord", f"{corr.ggd:.12g}"),
        ("nu_min (partial transpose)", f"{corr.nu_min_pt:.12g}"),
        ("standard form (alpha,beta,c+,c-)",
         _fmt_pair(corr.standard_form, "{:.6g}")),
    ]
    if corr.ggd_offstandard:
        rows.append(("note", "cross block off the diag(c,-c) form; "
                             "discord is a degraded estimate"))
    _print_aligned(rows)

    if args.out is not None:
        names = list(MEASURE_FIELDS)
        header = ",".join(names + ["stable"])
        values = ",".join(_fmt17(getattr(corr, MEASURE_FIELDS[m]))
                          for m in names) + ",1"
        _write(Path(args.out) / "point.csv", header + "\n" + values + "\n")
    return EXIT_OK


def _emit(result, out_dir: str, stem: str, formats: str, title: str) -> None:
    wanted = {f.strip() for f in formats.split(",") if f.strip()}
    unknown = wanted - {"csv", "svg"}
    if unknown:
        raise ConfigError(f"unknown output formats {sorted(unknown)}")
    out = Path(out_dir)
    if "csv" in wanted:
        _write(out / f"{stem}.csv", result_to_csv(result))
    if "svg" in wanted:
        _write(out / f"{stem}.svg", result_to_svg(result, title=title))


def cmd_figure(args) -> int:
    if args.id not in FIGURE_PRESET_IDS:
        print(f"error: unknown figure preset {args.id!r}; expected one of "
              f"{', '.join(FIGURE_PRESET_IDS)}", file=sys.stderr)
        return EXIT_CONFIG
    _, explicit, _ = load_config(args.config, args.set)
    spec = figure_preset(args.id)
    if explicit:
        spec = SweepSpec(base=apply_overrides(spec.base, explicit),
                         axis1=spec.axis1, axis2=spec.axis2,
                         measures=spec.measures, preset_id=spec.preset_id)
    result = run_sweep(spec, jobs=args.jobs)
    _emit(result, args.out, args.id, args.formats, title=args.id)
    stable = result.metadata["stable_points"]
    total = result.metadata["total_points"]
    print(f"{args.id}: {total} points ({stable} stable) -> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    full, _, table = load_config(args.config, args.set)
    if table is None:
        raise ConfigError(
            "the sweep command needs a [sweep] table in the config file"
        )
    base = params_from_config(full)
    spec = sweep_spec_from_table(base, table)
    result = run_sweep(spec, jobs=args.jobs)
    _emit(result, args.out, "sweep", args.formats, title="parameter sweep")
    stable = result.metadata["stable_points"]
    total = result.metadata["total_points"]
    print(f"sweep: {total} points ({stable} stable) -> {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    results = run_self_checks(seed=args.seed, inject_fault=args.inject_fault)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "pass" if r.passed else "FAIL"
        failed += not r.passed
        detail = f"  ({r.detail})" if r.detail else ""
        print(f"{r.name.ljust(width)}  {status}  worst={r.worst:.3e}  "
              f"tol={r.tolerance:.0e}{detail}")
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
        return EXIT_SELFTEST
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirrormag",
        description=("Stationary Gaussian correlations of two rotating "
                     "mirrors in magnon-coupled Laguerre-Gaussian cavities"),
    )
    parser.add_argument("--version", action="version",
                        version=f"mirrormag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, jobs=True):
        p.add_argument("--config", metavar="PATH",
                       help="TOML configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one configuration key (repeatable)")
        p.add_argument("--out", default="out", metavar="DIR",
                       help="output directory (default: out)")
        p.add_argument("--formats", default="csv,svg",
                       help="comma-separated subset of csv,svg")
        if jobs:
            p.add_argument("--jobs", type=int, default=1, metavar="N",
                           help="parallel worker processes (default 1)")

    p_point = sub.add_parser("point", help="evaluate one parameter point")
    p_point.add_argument("--config", metavar="PATH")
    p_point.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_point.add_argument("--out", default=None, metavar="DIR",
                         help="also write point.csv here")
    p_point.set_defaults(func=cmd_point)

    p_fig = sub.add_parser("figure", help="run a reference figure preset")
    p_fig.add_argument("id", help=f"one of {', '.join(FIGURE_PRESET_IDS)}")
    common(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a config file")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_check = sub.add_parser("check", help="run the self-test battery")
    p_check.add_argument("--seed", type=int, default=1234)
    p_check.add_argument("--inject-fault", action="store_true",
                         help=argparse.SUPPRESS)
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
