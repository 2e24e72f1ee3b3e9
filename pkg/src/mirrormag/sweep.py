"""Grid evaluation of the full pipeline and presets for the reference figures.

Every grid point runs derive -> build matrices -> stability -> Lyapunov ->
mirror-pair measures, independently of every other point, so the map is
embarrassingly parallel; results are always assembled in row-major axis
order regardless of execution order.  Unstable points are first-class rows
carrying only the stability flag.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .lyapunov import check_stability, solve_lyapunov
from .measures import CorrelationSet, correlation_set, extract_two_mode
from .model import PhysicalParams, build_system_matrices, derive_params

TWO_PI = 2.0 * math.pi

MEASURE_FIELDS = {
    "E": "log_negativity",
    "S12": "steering_12",
    "S21": "steering_21",
    "Ds": "steering_asymmetry",
    "GGD": "ggd",
}


def _set_delta_m(p, v):
    return p.replace(delta_m=v * p.omega_phi[1])


def _set_delta_a(p, v):
    w = v * p.omega_phi[1]
    return p.replace(delta_a=(w, w))


def _set_temperature(p, v):
    return p.replace(temperature=float(v))


def _set_mass(p, v):
    m = v * 1e-12
    return p.replace(mirror_mass=(m, m))


def _set_oam(p, v):
    return p.replace(oam_l=int(round(v)))


def _set_g_ma(p, v):
    g = TWO_PI * v * 1e6
    return p.replace(g_ma=(g, g))


def _set_freq_ratio(p, v):
    return p.replace(omega_phi=(v * p.omega_phi[1], p.omega_phi[1]))


def _set_power(p, v):
    w = v * 1e-3
    return p.replace(input_power=(w, w))


def _set_finesse(p, v):
    return p.replace(finesse=float(v))


#: Published list of sweepable parameter names.  Detunings and the frequency
#: ratio are normalized to the second mirror's rotation frequency.
SWEEPABLE_PARAMS = {
    "delta_m_over_wphi": _set_delta_m,
    "delta_a_over_wphi": _set_delta_a,
    "temperature_K": _set_temperature,
    "mass_ng": _set_mass,
    "oam_l": _set_oam,
    "g_ma_2pi_MHz": _set_g_ma,
    "wphi1_over_wphi2": _set_freq_ratio,
    "power_mW": _set_power,
    "finesse": _set_finesse,
}


@dataclass(frozen=True)
class SweepAxis:
    """One sweep axis: a published parameter name and its grid values."""

    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in SWEEPABLE_PARAMS:
            raise ValueError(
                f"unknown sweep parameter {self.name!r}; expected one of "
                f"{sorted(SWEEPABLE_PARAMS)}"
            )
        values = tuple(float(v) for v in self.values)
        if len(values) < 1:
            raise ValueError("axis needs at least one point")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("axis values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def linspace(cls, name: str, start: float, stop: float,
                 count: int) -> "SweepAxis":
        return cls(name=name, values=tuple(np.linspace(start, stop, count)))


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters plus one or two axes and the measures to report."""

    base: PhysicalParams
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    measures: tuple = ("E", "S12", "S21", "Ds", "GGD")
    preset_id: str | None = None

    def __post_init__(self):
        unknown = [m for m in self.measures if m not in MEASURE_FIELDS]
        if unknown:
            raise ValueError(f"unknown measures {unknown}; expected "
                             f"{sorted(MEASURE_FIELDS)}")
        object.__setattr__(self, "measures", tuple(self.measures))

    @property
    def shape(self) -> tuple:
        if self.axis2 is None:
            return (len(self.axis1.values),)
        return (len(self.axis1.values), len(self.axis2.values))


@dataclass(frozen=True)
class PointRecord:
    """Outcome of one grid point, row-major position implied by index.

    Unstable or failed points carry no correlation values, only the flag
    (and the error message for genuine failures).
    """

    coords: tuple
    stable: bool
    spectral_abscissa: float
    correlations: CorrelationSet | None
    g_ma_over_G: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    """Row-major grid records plus everything needed to reproduce the run."""

    spec: SweepSpec
    records: tuple
    metadata: dict

    def measure_grid(self, measure: str) -> np.ndarray:
        """Values of one measure on the grid shape, NaN where unavailable."""
        field = MEASURE_FIELDS[measure]
        out = np.full(len(self.records), np.nan)
        for i, rec in enumerate(self.records):
            if rec.correlations is not None:
                out[i] = getattr(rec.correlations, field)
        return out.reshape(self.spec.shape)

    def stable_grid(self) -> np.ndarray:
        return np.array([r.stable for r in self.records]).reshape(self.spec.shape)


def _apply_axes(base: PhysicalParams, spec: SweepSpec, coords: tuple):
    params = SWEEPABLE_PARAMS[spec.axis1.name](base, coords[0])
    if spec.axis2 is not None:
        params = SWEEPABLE_PARAMS[spec.axis2.name](params, coords[1])
    return params


def evaluate_point(params: PhysicalParams,
                   coords: tuple = ()) -> PointRecord:
    """Run the full pipeline on one parameter point.

    Never raises: failures are returned in-row as the ``error`` field.
    """
    try:
        derived = derive_params(params)
        mats = build_system_matrices(derived, params)
        report = check_stability(mats.drift)
        big_g = derived.enhanced_coupling[0]
        ratio = params.g_ma[0] / big_g if big_g > 0 else math.nan
        if not report.stable:
            return PointRecord(coords=coords, stable=False,
                               spectral_abscissa=report.spectral_abscissa,
                               correlations=None, g_ma_over_G=ratio)
        cm_full = solve_lyapunov(mats.drift, mats.diffusion, _check=False)
        corr = correlation_set(extract_two_mode(cm_full))
        return PointRecord(coords=coords, stable=True,
                           spectral_abscissa=report.spectral_abscissa,
                           correlations=corr, g_ma_over_G=ratio)
    except Exception as exc:  # per-point failures stay in-row
        return PointRecord(coords=coords, stable=False,
                           spectral_abscissa=math.nan, correlations=None,
                           g_ma_over_G=math.nan,
                           error=f"{type(exc).__name__}: {exc}")


def _worker(task):
    params, coords = task
    return evaluate_point(params, coords)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate the grid row-major; optionally over a process pool.

    The per-point evaluation is pure, so the result is identical for any
    worker count; aggregation always preserves row-major order.
    """
    if spec.axis2 is None:
        grid = [(v,) for v in spec.axis1.values]
    else:
        grid = [(v1, v2) for v1 in spec.axis1.values
                for v2 in spec.axis2.values]
    tasks = [(_apply_axes(spec.base, spec, coords), coords) for coords in grid]

    if jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = tuple(pool.map(_worker, tasks, chunksize=chunk))
    else:
        records = tuple(_worker(t) for t in tasks)

    metadata = _metadata(spec, records)
    return SweepResult(spec=spec, records=records, metadata=metadata)


def _metadata(spec: SweepSpec, records: tuple) -> dict:
    base = spec.base
    md = {
        "code_version": __version__,
        "preset_id": spec.preset_id or "",
        "axis1": spec.axis1.name,
        "axis1_points": len(spec.axis1.values),
        "quadrature_convention": "X=(a+a^dag)/sqrt(2); vacuum variance 1/2",
        "cavity_decay_formula": "gamma_a = pi*c/(2*L*finesse)",
        "detuning_convention": ("detuning = mode frequency - drive frequency; "
                                "positive detuning is the cooling sideband"),
        "detuning_mode": base.detuning_mode,
        "mirror_radius_m": base.mirror_radius,
        "oam_l": base.oam_l,
        "input_power_W": base.input_power,
        "wavelength_m": base.wavelength,
        "finesse": base.finesse,
        "quality_factor": base.quality_factor,
        "cavity_length_m": base.cavity_length,
        "mirror_mass_kg": base.mirror_mass,
        "omega_phi_rad_s": base.omega_phi,
        "gamma_m_rad_s": base.gamma_m,
        "g_ma_rad_s": base.g_ma,
        "delta_a_rad_s": base.delta_a,
        "delta_m_rad_s": base.delta_m,
        "temperature_K": base.temperature,
        "stable_points": int(sum(r.stable for r in records)),
        "total_points": len(records),
    }
    if spec.axis2 is not None:
        md["axis2"] = spec.axis2.name
        md["axis2_points"] = len(spec.axis2.values)
    if spec.preset_id in PRESET_NOTES:
        md["preset_note"] = PRESET_NOTES[spec.preset_id]
    return md


def _reference_base(**overrides) -> PhysicalParams:
    return PhysicalParams().replace(**overrides)


FIGURE_PRESET_IDS = ("fig2a", "fig2b", "fig2c", "fig2d",
                     "fig3a", "fig3b", "fig3c", "fig3d",
                     "fig4a", "fig4b")

#: Convention notes recorded in each preset's output metadata.
PRESET_NOTES = {
    "fig2a": ("detuning axes span both sidebands; the amplification side "
              "(delta_a < 0) is unstable at the reference drive power"),
    "fig2b": "delta_a = -omega_phi inherited from the detuning-plane panel",
    "fig2c": "delta_a = -omega_phi inherited from the detuning-plane panel",
    "fig2d": "delta_a = -omega_phi inherited from the detuning-plane panel",
    "fig3a": "delta_a = +omega_phi (stable cooling sideband)",
    "fig3b": ("delta_a = +omega_phi (stable cooling sideband); g_ma is swept "
              "directly and the g_ma/G axis value is reported per point"),
    "fig3c": "delta_a = +omega_phi (stable cooling sideband)",
    "fig3d": ("delta_a = -1.07 omega_phi as published; g_ma is swept directly "
              "and the g_ma/G axis value is reported per point"),
    "fig4a": "delta_a = +omega_phi (stable cooling sideband)",
    "fig4b": "delta_a = +omega_phi (stable cooling sideband)",
}


def figure_preset(preset_id: str) -> SweepSpec:
    """Sweep specification reproducing one panel of the reference figures.

    Grid resolutions default to 61x61 for two-dimensional panels and 101
    points per continuous axis otherwise.
    """
    w = TWO_PI * 10e6
    if preset_id == "fig2a":
        return SweepSpec(
            base=_reference_base(temperature=10.0, mirror_mass=40e-12),
            axis1=SweepAxis.linspace("delta_m_over_wphi", 0.0, 2.0, 61),
            axis2=SweepAxis.linspace("delta_a_over_wphi", -2.0, 2.0, 61),
            measures=("E",), preset_id=preset_id)
    if preset_id == "fig2b":
        return SweepSpec(
            base=_reference_base(delta_a=-w, mirror_mass=40e-12),
            axis1=SweepAxis.linspace("delta_m_over_wphi", 0.0, 2.0, 61),
            axis2=SweepAxis.linspace("temperature_K", 0.0, 400.0, 61),
            measures=("E",), preset_id=preset_id)
    if preset_id == "fig2c":
        return SweepSpec(
            base=_reference_base(delta_a=-w, temperature=10.0),
            axis1=SweepAxis.linspace("delta_m_over_wphi", 0.0, 2.0, 61),
            axis2=SweepAxis.linspace("mass_ng", 10.0, 100.0, 61),
            measures=("E",), preset_id=preset_id)
    if preset_id == "fig2d":
        return SweepSpec(
            base=_reference_base(delta_a=-w, temperature=10.0,
                                 mirror_mass=40e-12),
            axis1=SweepAxis.linspace("delta_m_over_wphi", 0.0, 2.0, 61),
            axis2=SweepAxis.linspace("oam_l", 40.0, 280.0, 61),
            measures=("E",), preset_id=preset_id)
    if preset_id == "fig3a":
        return SweepSpec(
            base=_reference_base(),
            axis1=SweepAxis("mass_ng", (40.0, 50.0, 60.0)),
            axis2=SweepAxis.linspace("temperature_K", 0.0, 400.0, 101),
            measures=("E",), preset_id=preset_id)
    if preset_id == "fig3b":
        return SweepSpec(
            base=_reference_base(temperature=0.4),
            axis1=SweepAxis("mass_ng", (40.0, 50.0, 60.0)),
            axis2=SweepAxis.linspace("g_ma_2pi_MHz", 0.0, 12.0, 101),
            measures=("E",), preset_id=preset_id)
    if preset_id == "fig3c":
        return SweepSpec(
            base=_reference_base(temperature=10e-3),
            axis1=SweepAxis.linspace("wphi1_over_wphi2", 0.2, 2.0, 101),
            measures=("E", "S12", "S21", "Ds"), preset_id=preset_id)
    if preset_id == "fig3d":
        return SweepSpec(
            base=_reference_base(delta_a=-1.07 * w, temperature=10.0,
                                 mirror_mass=60e-12),
            axis1=SweepAxis.linspace("delta_m_over_wphi", 0.0, 2.0, 61),
            axis2=SweepAxis.linspace("g_ma_2pi_MHz", 0.0, 12.0, 61),
            measures=("E",), preset_id=preset_id)
    if preset_id in ("fig4a", "fig4b"):
        mass = 60e-12 if preset_id == "fig4a" else 50e-12
        return SweepSpec(
            base=_reference_base(mirror_mass=mass,
                                 omega_phi=(0.7 * w, w)),
            axis1=SweepAxis.linspace("temperature_K", 0.0, 400.0, 101),
            measures=("E", "S12", "S21", "GGD"), preset_id=preset_id)
    raise ValueError(
        f"unknown figure preset {preset_id!r}; expected one of "
        f"{FIGURE_PRESET_IDS}"
    )
