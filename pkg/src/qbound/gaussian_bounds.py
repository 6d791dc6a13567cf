"""Closed-form bounds for the Gaussian families.

Everything here follows from one identity for the centred thermal state
``rho_0`` and displaced copies ``rho_(x,y)``:

    Tr rho_0^-1 rho_(x,y) rho_(z,w) = exp(J (xz + yw) + i A (xw - yz))

with ``J``, ``A`` from :func:`qbound.gaussian.gaussian_info_constants`.
Displacement covariance turns any product ``Tr rho_c^-1 rho_a rho_b`` into
this form.
"""

import math

import numpy as np

from .exceptions import InadmissibleStepError, InvalidInputError
from .gaussian import gaussian_info_constants
from .linalg import pinv_rank

__all__ = [
    "gaussian_2d_finite_delta_bound",
    "gaussian_case2_bounds",
    "gaussian_koike_bound",
    "gaussian_koike_bound_matrix",
    "gaussian_koike_bound_numeric",
    "gaussian_overlap_trace",
]


def gaussian_overlap_trace(x, y, z, w, sigma2):
    """``Tr rho_0^-1 rho_(x,y) rho_(z,w)`` for single-mode displaced thermal states.

    ``(x, y)`` and ``(z, w)`` are ``(<P>, <Q>)`` displacements.  The modulus is
    ``exp(J (xz + yw))``; the phase ``A (xw - yz)`` comes from the
    off-diagonal RLD information.
    """
    return complex(np.exp(_log_overlap(x, y, z, w, sigma2)))


def _log_overlap(x, y, z, w, sigma2):
    c = gaussian_info_constants(sigma2)
    return c.J * (x * z + y * w) + 1j * c.A * (x * w - y * z)


def gaussian_koike_bound(theta, delta1, sigma2):
    """Two-point Koike-type RLD bound for the scalar kinked Gaussian submodel.

    ``1/J + delta1^2 / (exp(J (theta^2 + delta1^2)) - 1 - theta^2 J)``.

    The first difference is the derivative at ``theta``; the second jumps
    across the kink to the point at distance ``delta1`` from the origin on the
    opposite branch (step ``-sign(theta) * delta1 - theta``).  Jumps that stay
    on the same branch add nothing beyond ``1/J``.
    """
    if delta1 == 0:
        raise InadmissibleStepError("delta1 must be nonzero")
    J = gaussian_info_constants(sigma2).J
    den = math.expm1(J * (theta ** 2 + delta1 ** 2)) - theta ** 2 * J
    if den <= 0:
        raise InadmissibleStepError(f"non-positive denominator {den!r}")
    return 1.0 / J + delta1 ** 2 / den


def _branch(x):
    """Per-mode P displacements of the scalar kinked submodel at ``x``."""
    return (x, 0.0) if x >= 0 else (0.0, x)


def _two_mode_log_overlap(c, a, b, sigma2):
    """``log Tr rho_c^-1 rho_a rho_b`` for the scalar kinked submodel."""
    return sum(_log_overlap(ma - mc, 0.0, mb - mc, 0.0, sigma2)
               for mc, ma, mb in zip(_branch(c), _branch(a), _branch(b)))


def gaussian_koike_bound_matrix(theta, delta1, sigma2, h=1e-6):
    """Same bound as :func:`gaussian_koike_bound`, through the 2x2 Gram matrix.

    Entries are assembled from overlap traces of the two-mode states.  The
    vanishing step is handled through ``log(overlap)``, which is exactly
    linear in the step within one branch, and ``v^T K^+ v`` is evaluated with a
    pseudo-inverse.
    """
    if delta1 == 0:
        raise InadmissibleStepError("delta1 must be nonzero")
    sign = 1.0 if theta >= 0 else -1.0
    landing = -sign * delta1
    step = landing - theta
    near = theta + sign * h  # stays on theta's branch
    k11 = np.expm1(_two_mode_log_overlap(theta, landing, landing, sigma2)) / step ** 2
    k12 = _two_mode_log_overlap(theta, near, landing, sigma2) / (sign * h) / step
    k22 = _two_mode_log_overlap(theta, near, near, sigma2) / h ** 2
    K = np.array([[k11, k12], [np.conj(k12), k22]])
    v = np.ones(2)
    Kp, _ = pinv_rank(K, 1e-12)
    return float(np.real(v @ Kp @ v))


def gaussian_case2_bounds(t2, sigma2):
    """RLD and SLD bounds on ``Sp V`` on the edge ``theta1 < 0, theta2 = 0``.

    ``t2`` is the split weight of the difference across the kink in the second
    coordinate.  Returns ``(rld, sld)``; a vanishing denominator gives
    ``math.inf``.  At ``t2 = 0`` the RLD value is ``2 sigma2 + 1`` for every
    ``sigma2 >= 1/2`` (the common factor ``sigma2^2 - 1/4`` cancels).
    """
    if not 0.0 <= t2 <= 1.0:
        raise InvalidInputError("t2 must lie in [0, 1]")
    if sigma2 < 0.5:
        raise InvalidInputError("sigma2 must be at least 1/2")
    s4 = sigma2 ** 2
    spread = 2 * t2 ** 2 - 2 * t2 + 1
    sld = sigma2 / spread + sigma2
    if t2 == 0.0:
        return 2 * sigma2 + 1, sld
    den = s4 * spread - (1 - t2) ** 2 / 4
    if den == 0:
        return math.inf, sld
    rld = (s4 - 0.25) * (2 * sigma2 * (t2 ** 2 - t2 + 1) + 1 - t2) / den
    return rld, sld


def gaussian_2d_finite_delta_bound(theta1, theta2, t, s, sigma2):
    """RLD difference bound on ``Sp V`` for the kinked two-parameter submodel.

    At ``theta1 < 0, theta2 < 0`` each coordinate is differenced forward to
    the other side of the kink, landing at ``t > 0`` (steps
    ``t - theta1`` and ``s - theta2``).  With

        a = (exp(J (theta1^2 + t^2)) - 1) / (t - theta1)^2
        d = (exp(J (theta2^2 + s^2)) - 1) / (s - theta2)^2
        b + i c = (exp(i A (ts + theta1 theta2)) - 1) / ((t - theta1)(s - theta2))

    the bound is ``(a + d + 2|c|) / (a d - b^2 - c^2)``.
    """
    if not (theta1 < 0 and theta2 < 0 and t > 0 and s > 0):
        raise InvalidInputError("need theta1, theta2 < 0 and t, s > 0")
    c = gaussian_info_constants(sigma2)
    d1, d2 = t - theta1, s - theta2
    a = math.expm1(c.J * (theta1 ** 2 + t ** 2)) / d1 ** 2
    d = math.expm1(c.J * (theta2 ** 2 + s ** 2)) / d2 ** 2
    beta = np.expm1(1j * c.A * (t * s + theta1 * theta2)) / (d1 * d2)
    b, cc = beta.real, beta.imag
    den = a * d - b ** 2 - cc ** 2
    if den <= 0:
        raise InadmissibleStepError(f"non-positive determinant {den!r}")
    return float((a + d + 2 * abs(cc)) / den)



def gaussian_koike_bound_numeric(theta, delta1, sigma2, flavor="sld", truncation=30):
    """Two-step bound of :func:`gaussian_koike_bound` evaluated on truncated Fock states.

    Works for either flavor.  The family is shifted so that the state at
    ``theta`` is the centred thermal state of both modes, which is diagonal
    with exactly known eigenvalues; that keeps the tiny product eigenvalues
    of the two-mode state usable instead of cutting them off.
    """
    from .bounds import gram_bound
    from .gaussian import _mode
    from .models import DifferenceSpec, Interval, ParametricModel, coordinate

    if delta1 == 0:
        raise InadmissibleStepError("delta1 must be nonzero")
    ref = _branch(theta)

    def state(th):
        shifted = [x - r for x, r in zip(_branch(th[0]), ref)]
        return np.kron(_mode(sigma2, truncation, shifted[0], 0.0),
                       _mode(sigma2, truncation, shifted[1], 0.0))

    model = ParametricModel(state, dim=(truncation + 1) ** 2, domain=(Interval(),),
                            validate=False, support_tol=0.0,
                            label=f"gaussian_singular_shifted(sigma2={sigma2})")
    sign = 1.0 if theta >= 0 else -1.0
    step = -sign * delta1 - theta
    specs = [DifferenceSpec(0.0, 1.0 if sign > 0 else 0.0), DifferenceSpec(step, 1.0)]
    return gram_bound(model, theta, coordinate(), specs, flavor).value
