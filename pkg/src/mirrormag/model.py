"""Physical model of a double Laguerre-Gaussian cavity with rotating mirrors
and a shared magnon mode.

Two optical cavities are each driven by an LG beam and closed by a rotating
mirror (Rm); a YIG sphere at the cavity intersection couples one magnon mode
to both cavity fields.  This module turns experimental knobs into the derived
coefficients of the linearized fluctuation dynamics and assembles the 10x10
drift matrix A and diffusion matrix D of

    du/dt = A u + n(t),   <n_i(t) n_j(t') + n_j(t') n_i(t)>/2 = D_ij delta(t-t')

in the canonical quadrature ordering ``CANONICAL_ORDERING``.

Conventions used throughout the package:

* quadratures X = (a + a^dag)/sqrt(2), Y = (a - a^dag)/(i sqrt(2)), so the
  vacuum variance is 1/2;
* detunings are mode frequency minus drive frequency (cavity: Delta_a =
  omega_a - omega_l); positive detuning is the cooling / anti-Stokes side
  of the mechanical sideband;
* cavity amplitude decay from finesse: gamma_a = pi c / (2 L F);
* all frequencies, rates and detunings in rad/s, all other quantities SI.
"""

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

HBAR = 1.054571817e-34  # J s
KBOLTZ = 1.380649e-23  # J / K
C_LIGHT = 299792458.0  # m / s

TWO_PI = 2.0 * math.pi

#: Fixed state ordering used by every matrix builder and consumer in the
#: package: angle / angular momentum of each mirror, X/Y quadrature of each
#: cavity, x/y quadrature of the magnon.
CANONICAL_ORDERING = (
    "phi1", "Lz1", "phi2", "Lz2", "X1", "Y1", "X2", "Y2", "x", "y",
)


class SteadyStateError(RuntimeError):
    """Fixed-point iteration for the operating point did not converge."""


def _pair(value) -> tuple:
    """Normalize a scalar or length-2 sequence to a 2-tuple."""
    if np.isscalar(value):
        return (value, value)
    pair = tuple(value)
    if len(pair) != 2:
        raise ValueError(f"expected a scalar or a pair, got {value!r}")
    return pair


@dataclass(frozen=True)
class PhysicalParams:
    """User-facing experimental knobs.

    Per-cavity / per-mirror fields accept either a scalar (applied to both)
    or a pair ``(value_1, value_2)``.  Defaults are the published reference
    parameter set with the operating point on the stable cooling sideband
    (``delta_m = delta_a = +omega_phi``).

    A single drive wavelength feeds both cavities; this enforces equal drive
    frequencies, which is what makes a single magnon detuning well defined.
    """

    mirror_radius: float = 10e-6            # m
    oam_l: int = 100                        # topological charge of the LG mode
    input_power: tuple = (50e-3, 50e-3)     # W per cavity
    wavelength: float = 810e-9              # m, same drive for both cavities
    finesse: float = 5e3
    quality_factor: float = 2e6             # mechanical Q of the rotors
    cavity_length: tuple = (1e-3, 1e-3)     # m per cavity
    mirror_mass: tuple = (40e-12, 40e-12)   # kg per mirror
    omega_phi: tuple = (TWO_PI * 10e6, TWO_PI * 10e6)  # rad/s per mirror
    gamma_m: float = TWO_PI * 1e6           # magnon amplitude decay, rad/s
    g_ma: tuple = (TWO_PI * 3.2e6, TWO_PI * 3.2e6)  # magnon-cavity coupling, rad/s
    delta_a: tuple = (TWO_PI * 10e6, TWO_PI * 10e6)  # cavity detuning, rad/s
    delta_m: float = TWO_PI * 10e6          # magnon detuning, rad/s
    temperature: float = 10.0               # K
    detuning_mode: str = "effective"        # or "bare_fixed_point"

    def __post_init__(self):
        for name in ("input_power", "cavity_length", "mirror_mass",
                     "omega_phi", "g_ma", "delta_a"):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        positives = {
            "mirror_radius": self.mirror_radius,
            "wavelength": self.wavelength,
            "finesse": self.finesse,
            "quality_factor": self.quality_factor,
            "gamma_m": self.gamma_m,
        }
        for name, value in positives.items():
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        for name in ("input_power", "cavity_length", "mirror_mass", "omega_phi"):
            for v in getattr(self, name):
                if not (v > 0 and math.isfinite(v)):
                    raise ValueError(f"{name} entries must be positive, got {v}")
        for v in self.g_ma:
            if v < 0 or not math.isfinite(v):
                raise ValueError(f"g_ma entries must be >= 0, got {v}")
        for v in (*self.delta_a, self.delta_m):
            if not math.isfinite(v):
                raise ValueError("detunings must be finite")
        if self.temperature < 0 or not math.isfinite(self.temperature):
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not (isinstance(self.oam_l, (int, np.integer)) and self.oam_l >= 1):
            raise ValueError(f"oam_l must be an integer >= 1, got {self.oam_l!r}")
        if self.detuning_mode not in ("effective", "bare_fixed_point"):
            raise ValueError(f"unknown detuning_mode {self.detuning_mode!r}")

    def replace(self, **changes) -> "PhysicalParams":
        """Return a copy with the given fields replaced (re-validated)."""
        return replace(self, **changes)

    @property
    def drive_frequency(self) -> float:
        """Angular frequency of the drive lasers, rad/s."""
        return TWO_PI * C_LIGHT / self.wavelength


@dataclass(frozen=True)
class DerivedParams:
    """Coefficients of the linearized dynamics, computed from PhysicalParams.

    All per-cavity / per-mirror entries are 2-tuples in cavity order.
    """

    inertia: tuple                   # kg m^2, m_j R^2 / 2
    opto_coupling: tuple             # rad/s, single-photon optorotational g_j
    drive_amplitude: tuple           # s^-1, drive amplitude eps_j
    cavity_decay: tuple              # rad/s, gamma_a_j
    mirror_damping: tuple            # rad/s, gamma_phi_j = omega_phi_j / Q
    steady_field: tuple              # complex intracavity amplitude a_s_j
    steady_magnon: complex           # steady magnon amplitude m_s
    steady_angle: tuple              # dimensionless mirror deflection phi_s_j
    eff_detuning: tuple              # rad/s, effective cavity detuning Delta_j
    magnon_selfenergy: tuple         # complex rad/s, lambda_j
    enhanced_coupling: tuple         # rad/s, G_j = sqrt(2) g_j |a_s_j|
    occupation: tuple                # mean thermal phonon number nbar_j
    omega_eff: tuple                 # rad/s, effective rotation frequency


@dataclass(frozen=True)
class SystemMatrices:
    """Drift and diffusion matrices in the canonical ordering."""

    drift: np.ndarray      # (10, 10), rad/s
    diffusion: np.ndarray  # (10, 10) diagonal PSD, rad/s
    ordering: tuple = CANONICAL_ORDERING


def mean_occupation(temperature: float, omega: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar omega / kB T) - 1).

    Returns exactly 0 at ``temperature == 0``.

    Parameters
    ----------
    temperature : float
        Bath temperature in K, >= 0.
    omega : float
        Mode angular frequency in rad/s, > 0.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = HBAR * omega / (KBOLTZ * temperature)
    if x > 700.0:  # expm1 would overflow; 1/(e^x - 1) ~ e^-x here
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def _steady_field(eps: float, delta: float, gamma_a: float,
                  selfenergy: complex) -> complex:
    """Intracavity amplitude for a given effective detuning."""
    return eps / (1j * delta + gamma_a + selfenergy)


def derive_params(params: PhysicalParams) -> DerivedParams:
    """Compute the operating point and all linearization coefficients.

    In ``detuning_mode == "effective"`` the user's ``delta_a`` is taken to be
    the effective cavity detuning directly (the natural reading when a figure
    axis is a detuning).  In ``"bare_fixed_point"`` the effective detuning is
    found by iterating ``Delta_j <- delta_a_j - g_j phi_s_j(Delta_j)`` from
    the bare value until the relative change drops below 1e-6 of omega_phi
    (at most 200 iterations).

    Raises
    ------
    SteadyStateError
        If the fixed-point iteration does not converge (multistable or
        unstable operating point).
    ValueError
        If any derived quantity is non-finite.
    """
    p = params
    omega_l = p.drive_frequency
    inertia = tuple(m * p.mirror_radius**2 / 2.0 for m in p.mirror_mass)
    opto = tuple(
        (C_LIGHT * p.oam_l / L) * math.sqrt(HBAR / (I * w))
        for L, I, w in zip(p.cavity_length, inertia, p.omega_phi)
    )
    gamma_a = tuple(math.pi * C_LIGHT / (2.0 * L * p.finesse)
                    for L in p.cavity_length)
    eps = tuple(math.sqrt(2.0 * P * ga / (HBAR * omega_l))
                for P, ga in zip(p.input_power, gamma_a))
    gamma_phi = tuple(w / p.quality_factor for w in p.omega_phi)
    selfenergy = tuple(g**2 / (1j * p.delta_m + p.gamma_m) for g in p.g_ma)

    field_s = []
    delta_eff = []
    for j in range(2):
        if p.detuning_mode == "effective":
            delta_j = p.delta_a[j]
            a_j = _steady_field(eps[j], delta_j, gamma_a[j], selfenergy[j])
        else:
            delta_j = p.delta_a[j]
            a_j = _steady_field(eps[j], delta_j, gamma_a[j], selfenergy[j])
            tol = 1e-6 * p.omega_phi[j]
            for _ in range(200):
                phi_s = opto[j] * abs(a_j) ** 2 / p.omega_phi[j]
                new_delta = p.delta_a[j] - opto[j] * phi_s
                a_j = _steady_field(eps[j], new_delta, gamma_a[j], selfenergy[j])
                if abs(new_delta - delta_j) < tol:
                    delta_j = new_delta
                    break
                delta_j = new_delta
            else:
                raise SteadyStateError(
                    "bare_fixed_point detuning iteration did not converge "
                    "within 200 steps; operating point may be multistable"
                )
        field_s.append(a_j)
        delta_eff.append(delta_j)
    field_s = tuple(field_s)
    delta_eff = tuple(delta_eff)

    magnon_s = (-1j * sum(g * a for g, a in zip(p.g_ma, field_s))
                / (1j * p.delta_m + p.gamma_m))
    angle_s = tuple(g * abs(a) ** 2 / w
                    for g, a, w in zip(opto, field_s, p.omega_phi))
    enhanced = tuple(math.sqrt(2.0) * g * abs(a)
                     for g, a in zip(opto, field_s))
    omega_eff = tuple(p.omega_phi)
    occupation = tuple(mean_occupation(p.temperature, w) for w in omega_eff)

    derived = DerivedParams(
        inertia=inertia,
        opto_coupling=opto,
        drive_amplitude=eps,
        cavity_decay=gamma_a,
        mirror_damping=gamma_phi,
        steady_field=field_s,
        steady_magnon=magnon_s,
        steady_angle=angle_s,
        eff_detuning=delta_eff,
        magnon_selfenergy=selfenergy,
        enhanced_coupling=enhanced,
        occupation=occupation,
        omega_eff=omega_eff,
    )
    flat = [*derived.inertia, *derived.opto_coupling, *derived.drive_amplitude,
            *derived.cavity_decay, *derived.mirror_damping,
            *derived.steady_angle, *derived.eff_detuning,
            *derived.enhanced_coupling, *derived.occupation,
            *(abs(a) for a in derived.steady_field), abs(derived.steady_magnon)]
    if not all(math.isfinite(v) for v in flat):
        raise ValueError("non-finite derived parameter; check the inputs")
    return derived


def effective_frequency(params: PhysicalParams, derived: DerivedParams,
                        omega: float, xi_phi: float,
                        input_power: float | None = None,
                        mirror: int = 0) -> float:
    """Drive-shifted rotation frequency of one mirror.

    Evaluates the radiation-torque correction to the bare rotation frequency:

        omega_eff^2 = omega_phi^2
            - (2 xi^2 gamma_a P / (I omega_a))
              * (Delta_a / (Delta_a + (gamma_a/2)^2))
              * ((gamma_a/2)^2 - (omega^2 - Delta_a^2))
                / (((gamma_a/2)^2 + (omega - Delta_a)^2)
                   * ((gamma_a/2)^2 + (omega + Delta_a)^2))

    The coupling strength ``xi_phi`` must be supplied by the caller; the
    default pipeline never calls this and uses omega_eff = omega_phi, which
    is the regime the reference parameter set sits in.

    Raises
    ------
    ValueError
        If the corrected squared frequency is negative (no real solution in
        this parameter regime); the failure is reported, never clamped.
    """
    if mirror not in (0, 1):
        raise ValueError("mirror index must be 0 or 1")
    p_in = params.input_power[mirror] if input_power is None else input_power
    w_phi = params.omega_phi[mirror]
    gamma_a = derived.cavity_decay[mirror]
    delta_a = params.delta_a[mirror]
    inertia = derived.inertia[mirror]
    omega_a = params.drive_frequency + delta_a
    half = (gamma_a / 2.0) ** 2
    prefactor = 2.0 * xi_phi**2 * gamma_a * p_in / (inertia * omega_a)
    lorentz = delta_a / (delta_a + half)
    numer = half - (omega**2 - delta_a**2)
    denom = (half + (omega - delta_a) ** 2) * (half + (omega + delta_a) ** 2)
    w2 = w_phi**2 - prefactor * lorentz * numer / denom
    if w2 < 0:
        raise ValueError(
            f"effective squared frequency is negative ({w2:.3e}); "
            "no real rotation frequency in this regime"
        )
    return math.sqrt(w2)


def build_system_matrices(derived: DerivedParams,
                          params: PhysicalParams) -> SystemMatrices:
    """Assemble the drift matrix A and diffusion matrix D.

    Row by row (canonical ordering, j = 1, 2):

        d phi_j  = omega_phi_j Lz_j
        d Lz_j   = -omega_phi_j phi_j - gamma_phi_j Lz_j + G_j X_j
        d X_j    = Delta_j Y_j - gamma_a_j X_j + g_ma_j y
        d Y_j    = -Delta_j X_j - gamma_a_j Y_j - g_ma_j x + G_j phi_j
        d x      = Delta_m y - gamma_m x + sum_j g_ma_j Y_j
        d y      = -Delta_m x - gamma_m y - sum_j g_ma_j X_j

    D is diagonal: zero on the angle rows, gamma_phi_j (2 nbar_j + 1) on the
    angular-momentum rows, gamma_a_j on the cavity rows and gamma_m on the
    magnon rows.  The build is pure: identical inputs give identical bytes.
    """
    p, d = params, derived
    A = np.zeros((10, 10))
    for j, (row_phi, row_l, row_x, row_y) in enumerate(((0, 1, 4, 5),
                                                        (2, 3, 6, 7))):
        w = p.omega_phi[j]
        A[row_phi, row_l] = w
        A[row_l, row_phi] = -w
        A[row_l, row_l] = -d.mirror_damping[j]
        A[row_l, row_x] = d.enhanced_coupling[j]
        A[row_x, row_x] = -d.cavity_decay[j]
        A[row_x, row_y] = d.eff_detuning[j]
        A[row_x, 9] = p.g_ma[j]
        A[row_y, row_x] = -d.eff_detuning[j]
        A[row_y, row_y] = -d.cavity_decay[j]
        A[row_y, 8] = -p.g_ma[j]
        A[row_y, row_phi] = d.enhanced_coupling[j]
        A[8, row_y] = p.g_ma[j]
        A[9, row_x] = -p.g_ma[j]
    A[8, 8] = -p.gamma_m
    A[8, 9] = p.delta_m
    A[9, 8] = -p.delta_m
    A[9, 9] = -p.gamma_m

    diag = np.array([
        0.0,
        d.mirror_damping[0] * (2.0 * d.occupation[0] + 1.0),
        0.0,
        d.mirror_damping[1] * (2.0 * d.occupation[1] + 1.0),
        d.cavity_decay[0], d.cavity_decay[0],
        d.cavity_decay[1], d.cavity_decay[1],
        p.gamma_m, p.gamma_m,
    ])
    return SystemMatrices(drift=A, diffusion=np.diag(diag))
