"""Gaussian correlation measures on two-mode covariance blocks.

All measures use the vacuum-1/2 quadrature convention (X = (a + a^dag)/sqrt 2),
so a state is physical iff every symplectic eigenvalue is >= 1/2 and a
two-mode state is separable iff the smallest partial-transpose symplectic
eigenvalue satisfies 2 nu >= 1.  Logarithms are natural; every measure is
clamped at zero from below with a 1e-12 slack for roundoff.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lyapunov import CovarianceMatrix
from .model import CANONICAL_ORDERING

#: Mode labels -> index of the first of its two rows in the canonical ordering.
MODE_BLOCKS = {
    "mirror1": 0,
    "mirror2": 2,
    "cavity1": 4,
    "cavity2": 6,
    "magnon": 8,
}

_OMEGA2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


class OffStandardFormWarning(UserWarning):
    """Cross block is not of the anti-correlated diag(c, -c) form."""


@dataclass(frozen=True)
class TwoModeCM:
    """4x4 two-mode covariance matrix with named 2x2 blocks.

    ``V`` and ``F`` are the self-covariance blocks of the two modes and
    ``Theta`` the cross block, assembled as [[V, Theta], [Theta^T, F]].
    """

    V: np.ndarray
    F: np.ndarray
    Theta: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.V, self.Theta], [self.Theta.T, self.F]])


@dataclass(frozen=True)
class CorrelationSet:
    """All stationary correlation measures for one mode pair."""

    log_negativity: float        # E >= 0
    steering_12: float           # S_{1->2} >= 0
    steering_21: float           # S_{2->1} >= 0
    steering_asymmetry: float    # |S12 - S21|, bounded by ln 2
    ggd: float                   # Gaussian geometric discord >= 0
    nu_min_pt: float             # smallest partial-transpose symplectic eigenvalue
    standard_form: tuple         # (alpha, beta, c_plus, c_minus)
    ggd_offstandard: bool        # cross block not of diag(c, -c) form


def extract_two_mode(cm, mode_a: str = "mirror1",
                     mode_b: str = "mirror2") -> TwoModeCM:
    """Pull the 4x4 covariance of a mode pair out of the full 10x10 matrix.

    ``cm`` may be a CovarianceMatrix or a bare ndarray in the canonical
    ordering.  The default pair is the two mirrors.
    """
    Y = cm.matrix if isinstance(cm, CovarianceMatrix) else np.asarray(cm, float)
    for label in (mode_a, mode_b):
        if label not in MODE_BLOCKS:
            raise KeyError(
                f"unknown mode label {label!r}; expected one of "
                f"{sorted(MODE_BLOCKS)}"
            )
    ia, ib = MODE_BLOCKS[mode_a], MODE_BLOCKS[mode_b]
    sa, sb = slice(ia, ia + 2), slice(ib, ib + 2)
    return TwoModeCM(V=Y[sa, sa].copy(), F=Y[sb, sb].copy(),
                     Theta=Y[sa, sb].copy())


def symplectic_spectrum(matrix: np.ndarray,
                        partial_transpose: bool = False) -> np.ndarray:
    """Symplectic eigenvalues of a 2n x 2n covariance matrix, ascending.

    Returns the absolute values of the eigenvalue pairs of i Omega M, one per
    mode.  With ``partial_transpose`` (4x4 only) the momentum of the second
    mode is sign-flipped first, which implements transposition of that mode.
    """
    M = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("covariance matrix contains non-finite entries")
    n2 = M.shape[0]
    if M.shape != (n2, n2) or n2 % 2:
        raise ValueError("covariance matrix must be square of even dimension")
    if partial_transpose:
        if n2 != 4:
            raise ValueError("partial transpose is defined here for 4x4 only")
        flip = np.diag([1.0, 1.0, 1.0, -1.0])
        M = flip @ M @ flip
    omega = np.kron(np.eye(n2 // 2), _OMEGA2)
    eigs = np.sort(np.abs(np.linalg.eigvals(1j * omega @ M)))
    return eigs[::2]  # each value appears as a +/- pair


def _dets(cm: TwoModeCM):
    return (np.linalg.det(cm.V), np.linalg.det(cm.F),
            np.linalg.det(cm.Theta), np.linalg.det(cm.matrix))


def _pt_nu_squared(cm: TwoModeCM) -> float:
    """Squared smallest partial-transpose symplectic eigenvalue.

    With u = det V + det F - 2 det Theta the closed form is
    nu^2 = (u - sqrt(u^2 - 4 det Y)) / 2; the factor 4 under the root is
    what makes the vacuum give exactly 2 nu = 1.  Evaluated in the
    rationalized form 2 det Y / (u + sqrt(u^2 - 4 det Y)), which avoids the
    cancellation that otherwise eats the small eigenvalue of strongly
    squeezed states.  A discriminant below -1e-9 u^2 signals an unphysical
    input and raises; smaller negatives are treated as roundoff.
    """
    det_v, det_f, det_t, det_y = _dets(cm)
    u = det_v + det_f - 2.0 * det_t
    disc = u * u - 4.0 * det_y
    if disc < -1e-9 * max(u * u, 1e-300):
        raise ValueError(
            f"negative discriminant {disc:.3e} in the symplectic closed form; "
            "input covariance is not a physical state"
        )
    root = math.sqrt(max(disc, 0.0))
    nu2 = (2.0 * det_y / (u + root)) if det_y > 0 and u + root > 0 \
        else 0.5 * (u - root)
    if nu2 <= 0:
        raise ValueError(
            f"non-positive squared symplectic eigenvalue {nu2:.3e}; "
            "input covariance is not a physical state"
        )
    return nu2


def min_pt_symplectic(cm: TwoModeCM) -> float:
    """Smallest partial-transpose symplectic eigenvalue (closed form)."""
    return math.sqrt(_pt_nu_squared(cm))


def log_negativity(cm: TwoModeCM) -> float:
    """Logarithmic negativity E = max(0, -ln 2 nu_pt) of a two-mode state."""
    value = -0.5 * math.log(4.0 * _pt_nu_squared(cm))
    return max(0.0, value) if value > -1e-12 else 0.0


def gaussian_steering(cm: TwoModeCM) -> tuple:
    """Directional Gaussian steering (S12, S21, asymmetry).

    S_{1->2} = max(0, (1/2) ln(det V / (4 det Y))) quantifies steering of
    mode 2 by Gaussian measurements on mode 1 (and symmetrically with
    V <-> F).  This determinant-ratio form equals the Schur-complement form
    -(1/2) ln(4 det(F - Theta^T V^-1 Theta)) by the determinant identity;
    see ``steering_via_schur`` for the cross-check route.
    """
    det_v, det_f, _, det_y = _dets(cm)
    if det_v <= 0 or det_f <= 0:
        raise ValueError("singular marginal block; steering is undefined")
    if det_y <= 0:
        raise ValueError("non-positive total determinant; unphysical input")
    s12 = 0.5 * math.log(det_v / (4.0 * det_y))
    s21 = 0.5 * math.log(det_f / (4.0 * det_y))
    s12 = max(0.0, s12) if s12 > -1e-12 else 0.0
    s21 = max(0.0, s21) if s21 > -1e-12 else 0.0
    return s12, s21, abs(s12 - s21)


def steering_via_schur(cm: TwoModeCM) -> tuple:
    """Steering from the conditional-state Schur complement (cross-check).

    Computes S_{1->2} = max(0, -(1/2) ln(4 det(F - Theta^T V^-1 Theta))) and
    the symmetric partner directly; algebraically identical to
    ``gaussian_steering`` but numerically independent of it.
    """
    try:
        v_inv = np.linalg.inv(cm.V)
        f_inv = np.linalg.inv(cm.F)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular marginal block; steering is undefined") from exc
    cond_2 = cm.F - cm.Theta.T @ v_inv @ cm.Theta
    cond_1 = cm.V - cm.Theta @ f_inv @ cm.Theta.T
    s12 = -0.5 * math.log(4.0 * np.linalg.det(cond_2))
    s21 = -0.5 * math.log(4.0 * np.linalg.det(cond_1))
    s12 = max(0.0, s12) if s12 > -1e-12 else 0.0
    s21 = max(0.0, s21) if s21 > -1e-12 else 0.0
    return s12, s21, abs(s12 - s21)


def _standard_form_exact(cm: TwoModeCM):
    """Direct read-out when the input is already in standard form.

    The invariant-based recovery of (c+, c-) is ill-conditioned when
    |c+| = |c-| (the two roots coincide), so inputs that already have
    V = alpha I, F = beta I and diagonal Theta return their own entries,
    reordered by the allowed local rotations: a pi/2 rotation of both modes
    swaps the two diagonal Theta entries and a pi rotation of one mode
    flips their common sign.
    """
    scale = max(abs(cm.V[0, 0]), abs(cm.F[0, 0]))
    tol = 1e-12 * scale
    if (abs(cm.V[0, 1]) > tol or abs(cm.V[1, 0]) > tol
            or abs(cm.F[0, 1]) > tol or abs(cm.F[1, 0]) > tol
            or abs(cm.V[0, 0] - cm.V[1, 1]) > tol
            or abs(cm.F[0, 0] - cm.F[1, 1]) > tol
            or abs(cm.Theta[0, 1]) > tol or abs(cm.Theta[1, 0]) > tol):
        return None
    alpha, beta = cm.V[0, 0], cm.F[0, 0]
    if alpha <= 0 or beta <= 0:
        raise ValueError("marginal block with non-positive variance")
    c_plus, c_minus = cm.Theta[0, 0], cm.Theta[1, 1]
    if abs(c_plus) < abs(c_minus):
        c_plus, c_minus = c_minus, c_plus
    if c_plus < 0:
        c_plus, c_minus = -c_plus, -c_minus
    return float(alpha), float(beta), float(c_plus), float(c_minus)


def standard_form(cm: TwoModeCM) -> tuple:
    """Local-symplectic standard-form parameters (alpha, beta, c+, c-).

    alpha = sqrt(det V), beta = sqrt(det F); the cross parameters are
    recovered from det Theta = c+ c- together with
    det Y = (alpha beta - c+^2)(alpha beta - c-^2), with the convention
    c+ >= |c-| and sign(c-) = sign(det Theta).  Invariant under local
    rotations of either mode.
    """
    exact = _standard_form_exact(cm)
    if exact is not None:
        return exact
    det_v, det_f, det_t, det_y = _dets(cm)
    if det_v <= 0 or det_f <= 0:
        raise ValueError("marginal block with non-positive determinant")
    alpha = math.sqrt(det_v)
    beta = math.sqrt(det_f)
    ab = alpha * beta
    # c+^2 + c-^2 from expanding the det Y identity
    sum_sq = (ab * ab + det_t * det_t - det_y) / ab
    disc = sum_sq * sum_sq - 4.0 * det_t * det_t
    tol = 1e-9 * max(sum_sq * sum_sq, 1e-300)
    if sum_sq < -1e-12 or disc < -tol:
        raise ValueError(
            "no real standard-form solution; input covariance is unphysical"
        )
    root = math.sqrt(max(disc, 0.0))
    t_plus = max(0.5 * (sum_sq + root), 0.0)
    t_minus = max(0.5 * (sum_sq - root), 0.0)
    c_plus = math.sqrt(t_plus)
    c_minus = math.copysign(math.sqrt(t_minus), det_t) if det_t != 0 else 0.0
    return alpha, beta, c_plus, c_minus


def ggd(cm: TwoModeCM) -> float:
    """Gaussian geometric discord of a two-mode state.

    In the standard form with an anti-correlated cross block
    Theta = diag(c, -c),

        D_G = 1 / (4 (alpha beta - c^2))
              - 9 / (2 sqrt(4 alpha beta - 3 c^2) + 2 sqrt(alpha beta))^2

    For numerically produced states where c+ != -c-, the substitution
    c^2 = -c+ c- (= -det Theta) is used and an OffStandardFormWarning is
    attached when |c+ + c-| exceeds 1e-6 alpha beta; the result is clamped
    at zero from below.
    """
    alpha, beta, c_plus, c_minus = standard_form(cm)
    ab = alpha * beta
    if abs(c_plus + c_minus) > 1e-6 * ab:
        warnings.warn(
            "cross block is not of the diag(c, -c) form; using "
            "c^2 = -det Theta, the discord value is a degraded estimate",
            OffStandardFormWarning,
            stacklevel=2,
        )
    c_sq = c_plus * (-c_minus)
    radicand = 4.0 * ab - 3.0 * c_sq
    if radicand < 0:
        raise ValueError(
            f"negative radicand {radicand:.3e} in the discord closed form; "
            "input covariance is unphysical"
        )
    if ab - c_sq <= 0:
        raise ValueError("alpha beta - c^2 <= 0; input covariance is unphysical")
    value = (1.0 / (4.0 * (ab - c_sq))
             - 9.0 / (2.0 * math.sqrt(radicand) + 2.0 * math.sqrt(ab)) ** 2)
    return max(0.0, value)


def correlation_set(cm: TwoModeCM) -> CorrelationSet:
    """Evaluate every measure on one two-mode covariance."""
    s12, s21, asym = gaussian_steering(cm)
    sf = standard_form(cm)
    alpha, beta, c_plus, c_minus = sf
    offstandard = abs(c_plus + c_minus) > 1e-6 * alpha * beta
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OffStandardFormWarning)
        discord = ggd(cm)
    return CorrelationSet(
        log_negativity=log_negativity(cm),
        steering_12=s12,
        steering_21=s21,
        steering_asymmetry=asym,
        ggd=discord,
        nu_min_pt=min_pt_symplectic(cm),
        standard_form=sf,
        ggd_offstandard=offstandard,
    )


def tmsv_cm(r: float) -> TwoModeCM:
    """Two-mode squeezed vacuum with squeezing parameter r (test state).

    V = F = (cosh 2r / 2) I and Theta = (sinh 2r / 2) diag(1, -1); at r = 0
    this is the two-mode vacuum.
    """
    ch, sh = math.cosh(2.0 * r) / 2.0, math.sinh(2.0 * r) / 2.0
    return TwoModeCM(
        V=ch * np.eye(2),
        F=ch * np.eye(2),
        Theta=np.array([[sh, 0.0], [0.0, -sh]]),
    )
