"""Stability analysis and steady-state covariance of the linear fluctuation
dynamics du/dt = A u + n(t).

The stationary covariance Y solves  A Y + Y A^T + D = 0.  At n = 10 a dense
Kronecker-sum vectorization with pivoted elimination is exact-cost-trivial,
so that is the production solver; two integration-based routes are kept as
independent oracles:

* ``integrate_covariance_ode`` -- classical fixed-step fourth-order
  Runge-Kutta on dY/dt = A Y + Y A^T + D (explicit; only usable when the
  drift spectrum is not too stiff);
* ``covariance_by_doubling`` -- exact discretization (matrix exponential,
  Van Loan block trick) with interval doubling, which handles arbitrarily
  stiff stable drifts.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import CANONICAL_ORDERING


class UnstableDriftError(RuntimeError):
    """The drift matrix has a non-negative spectral abscissa."""


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalue-based stability verdict for a drift matrix."""

    stable: bool
    spectral_abscissa: float     # max real part of the eigenvalues, rad/s
    eigenvalues: np.ndarray      # complex spectrum


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric steady-state covariance in the canonical ordering."""

    matrix: np.ndarray
    ordering: tuple = CANONICAL_ORDERING


def check_stability(drift: np.ndarray) -> StabilityReport:
    """Routh-Hurwitz-equivalent stability test via the eigenvalue criterion.

    Stable iff every eigenvalue of the drift matrix has a negative real
    part; the spectral abscissa is returned for diagnostics.  Eigenvalue
    solver failures propagate (never swallowed).
    """
    drift = np.asarray(drift, dtype=float)
    if not np.all(np.isfinite(drift)):
        raise ValueError("drift matrix contains non-finite entries")
    eigenvalues = np.linalg.eigvals(drift)
    abscissa = float(eigenvalues.real.max())
    return StabilityReport(stable=abscissa < 0.0,
                           spectral_abscissa=abscissa,
                           eigenvalues=eigenvalues)


def solve_lyapunov(drift: np.ndarray, diffusion: np.ndarray,
                   _check: bool = True) -> CovarianceMatrix:
    """Solve A Y + Y A^T + D = 0 for the stationary covariance Y.

    Vectorizes the equation into an n^2 x n^2 linear system through the
    Kronecker-sum identity and solves it with pivoted LU elimination.  The
    result is symmetrized once; asymmetry beyond 1e-8 relative, or a residual
    above 1e-9 * max(1, ||D||_max), raises a diagnostic.

    Raises
    ------
    UnstableDriftError
        If the drift matrix is not strictly stable.
    numpy.linalg.LinAlgError
        If the vectorized system is singular (marginal stability).
    """
    A = np.asarray(drift, dtype=float)
    D = np.asarray(diffusion, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or D.shape != (n, n):
        raise ValueError("drift and diffusion must be square and same-shaped")
    if _check:
        report = check_stability(A)
        if not report.stable:
            raise UnstableDriftError(
                f"drift matrix is unstable (spectral abscissa "
                f"{report.spectral_abscissa:.6e} rad/s >= 0)"
            )
    eye = np.eye(n)
    kron_sum = np.kron(eye, A) + np.kron(A, eye)
    y = np.linalg.solve(kron_sum, -D.reshape(-1))
    Y = y.reshape(n, n)
    asym = np.abs(Y - Y.T).max()
    scale = max(np.abs(Y).max(), 1e-300)
    if asym > 1e-8 * scale:
        warnings.warn(
            f"Lyapunov solution asymmetry {asym / scale:.3e} relative "
            "exceeds 1e-8; input may be near marginal stability",
            RuntimeWarning,
            stacklevel=2,
        )
    Y = 0.5 * (Y + Y.T)
    residual = np.abs(A @ Y + Y @ A.T + D).max()
    tol = 1e-9 * max(1.0, np.abs(D).max())
    if residual > tol:
        raise np.linalg.LinAlgError(
            f"Lyapunov residual {residual:.3e} exceeds tolerance {tol:.3e}; "
            "system is near-singular (marginal stability)"
        )
    return CovarianceMatrix(matrix=Y)


def integrate_covariance_ode(drift: np.ndarray, diffusion: np.ndarray,
                             t_final: float, dt: float) -> CovarianceMatrix:
    """Fixed-step fourth-order Runge-Kutta integration of
    dY/dt = A Y + Y A^T + D from Y(0) = 0.  Test oracle only.

    Requires a stable drift and ``dt < 0.1 / |spectral_abscissa|``.  Being an
    explicit scheme it additionally needs dt small against the fastest decay
    scale; divergence is detected by a growth guard and reported.
    """
    A = np.asarray(drift, dtype=float)
    D = np.asarray(diffusion, dtype=float)
    report = check_stability(A)
    if not report.stable:
        raise UnstableDriftError("covariance ODE requires a stable drift")
    if not dt < 0.1 / abs(report.spectral_abscissa):
        raise ValueError("dt must be below 0.1 / |spectral abscissa|")
    guard = 1e6 * max(np.abs(D).max(), 1.0) / (2.0 * abs(report.spectral_abscissa))

    def rhs(Y):
        return A @ Y + Y @ A.T + D

    n = A.shape[0]
    Y = np.zeros((n, n))
    steps = int(round(t_final / dt))
    for _ in range(steps):
        k1 = rhs(Y)
        k2 = rhs(Y + 0.5 * dt * k1)
        k3 = rhs(Y + 0.5 * dt * k2)
        k4 = rhs(Y + dt * k3)
        Y = Y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(Y)) or np.abs(Y).max() > guard:
            raise RuntimeError(
                "covariance ODE diverged: step size too large for the "
                "fastest decay scale of the drift"
            )
    return CovarianceMatrix(matrix=0.5 * (Y + Y.T))


def covariance_by_doubling(drift: np.ndarray, diffusion: np.ndarray,
                           t_final: float) -> CovarianceMatrix:
    """Integrate dY/dt = A Y + Y A^T + D by exact interval doubling.

    Builds the exact one-step discretization over a short interval h with
    the Van Loan block-exponential

        expm([[-A, D], [0, A^T]] h) = [[., Phi^-1 Q_h], [0, Phi^T]]

    so Y(h) = Phi Y(0) Phi^T + Q_h, then doubles the interval
    (Q_2t = Phi_t Q_t Phi_t^T + Q_t) until t_final is covered.  Handles
    stiff stable drifts that an explicit scheme cannot; used as the
    integration oracle for the reference operating point.
    """
    A = np.asarray(drift, dtype=float)
    D = np.asarray(diffusion, dtype=float)
    report = check_stability(A)
    if not report.stable:
        raise UnstableDriftError("covariance doubling requires a stable drift")
    n = A.shape[0]
    rho = float(np.abs(report.eigenvalues).max())
    doublings = max(int(np.ceil(np.log2(t_final * rho))) + 8, 8)
    h = t_final / 2.0**doublings

    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -A * h
    block[:n, n:] = D * h
    block[n:, n:] = A.T * h
    exp_block = scipy.linalg.expm(block)
    phi = exp_block[n:, n:].T                 # expm(A h)
    q = phi @ exp_block[:n, n:]               # integral of expm(As) D expm(A^T s)

    for _ in range(doublings):
        q = phi @ q @ phi.T + q
        phi = phi @ phi
    return CovarianceMatrix(matrix=0.5 * (q + q.T))
