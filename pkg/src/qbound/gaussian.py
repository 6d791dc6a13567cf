"""Displaced thermal states in a truncated Fock basis.

Conventions: ``a|n> = sqrt(n)|n-1>``, ``Q = (a + a^dagger)/sqrt(2)``,
``P = (a - a^dagger)/(i sqrt(2))`` so ``[Q, P] = i``.  The state with mean
``(theta1, theta2)`` has ``<P> = theta1`` and ``<Q> = theta2`` and quadrature
variance ``sigma2`` (``sigma2 = 1/2`` is a coherent state).  It is the thermal
state with mean photon number ``sigma2 - 1/2`` displaced by
``alpha = (theta2 + i theta1)/sqrt(2)``.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.linalg import expm

from .exceptions import InvalidInputError, TruncationError
from .models import Interval, ParametricModel

__all__ = [
    "GaussianInfoConstants",
    "GaussianParams",
    "gaussian_fock_state",
    "gaussian_info_constants",
    "gaussian_model",
    "gaussian_singular_submodel",
    "quadratures",
    "thermal_ratio",
]

TAIL_TOL = 1e-6
_PAD = 40


@dataclass(frozen=True)
class GaussianParams:
    sigma2: float
    mean: Tuple[float, float] = (0.0, 0.0)
    truncation: int = 60

    def __post_init__(self):
        if not self.sigma2 >= 0.5:
            raise InvalidInputError(f"sigma2 must be at least 1/2, got {self.sigma2}")
        if self.truncation < 8:
            raise InvalidInputError("Fock truncation must be at least 8")
        object.__setattr__(self, "mean", (float(self.mean[0]), float(self.mean[1])))


@dataclass(frozen=True)
class GaussianInfoConstants:
    """Entries of the RLD information matrix of the two-parameter Gaussian family.

    ``J`` is the diagonal entry and ``A`` the modulus of the off-diagonal one:
    ``J^R = [[J, -iA], [iA, J]]`` while ``J^S = diag(1/sigma2, 1/sigma2)``.
    """

    sigma2: float
    J: float
    A: float

    def rld_matrix(self):
        return np.array([[self.J, -1j * self.A], [1j * self.A, self.J]])

    def sld_matrix(self):
        return np.eye(2) / self.sigma2


def gaussian_info_constants(sigma2):
    if not sigma2 > 0.5:
        raise InvalidInputError("RLD information diverges at sigma2 = 1/2")
    e = sigma2 ** 2 - 0.25
    return GaussianInfoConstants(sigma2, sigma2 / e, 0.5 / e)


def thermal_ratio(sigma2):
    """Ratio ``q`` of successive Fock populations of the centred state."""
    nbar = sigma2 - 0.5
    return nbar / (nbar + 1.0)


def _lowering(n):
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def quadratures(truncation):
    """Truncated ``(P, Q)`` on ``span{|0>, ..., |truncation>}``."""
    a = _lowering(truncation + 1)
    Q = (a + a.conj().T) / np.sqrt(2)
    P = (a - a.conj().T) / (1j * np.sqrt(2))
    return P, Q


@lru_cache(maxsize=512)
def _fock_state(sigma2, p_mean, q_mean, truncation):
    big = truncation + 1 + _PAD
    q = thermal_ratio(sigma2)
    pops = (1 - q) * q ** np.arange(big) if q > 0 else np.eye(1, big)[0]
    alpha = (q_mean + 1j * p_mean) / np.sqrt(2)
    if alpha == 0:
        rho = np.diag(pops[:truncation + 1]).astype(complex)
    else:
        a = _lowering(big)
        disp = expm(alpha * a.conj().T - np.conj(alpha) * a)[:truncation + 1]
        rho = (disp * pops) @ disp.conj().T
    tail = 1.0 - np.trace(rho).real
    rho = rho / np.trace(rho).real
    rho = 0.5 * (rho + rho.conj().T)
    rho.setflags(write=False)
    return rho, max(tail, 0.0)


def gaussian_fock_state(params, tail_tol=TAIL_TOL):
    """Displaced thermal state on ``|0>, ..., |N>``, renormalized.

    Returns
    -------
    rho : ndarray
        ``(N+1) x (N+1)`` density matrix.
    tail : float
        Weight discarded by the truncation before renormalization.

    Raises
    ------
    TruncationError
        If the discarded weight exceeds ``tail_tol``.
    """
    rho, tail = _fock_state(float(params.sigma2), params.mean[0], params.mean[1],
                            int(params.truncation))
    if tail > tail_tol:
        raise TruncationError(
            f"Fock truncation N={params.truncation} discards weight {tail:.2e} "
            f"(sigma2={params.sigma2}, mean={params.mean})")
    return rho, tail


def _mode(sigma2, truncation, p_mean, q_mean):
    return gaussian_fock_state(GaussianParams(sigma2, (p_mean, q_mean), truncation))[0]


def gaussian_model(sigma2, truncation=60):
    """Single-mode family with parameter ``(theta1, theta2) = (<P>, <Q>)``."""
    return ParametricModel(
        lambda th: _mode(sigma2, truncation, th[0], th[1]),
        dim=truncation + 1, m=2, domain=(Interval(), Interval()),
        label=f"gaussian2(sigma2={sigma2}, N={truncation})", validate=False)


def _scalar_singular(sigma2, truncation, th):
    x = th[0]
    if x >= 0:
        a, b = (x, 0.0), (0.0, 0.0)
    else:
        a, b = (0.0, 0.0), (x, 0.0)
    return np.kron(_mode(sigma2, truncation, *a), _mode(sigma2, truncation, *b))


def _vector_singular(sigma2, truncation, th):
    x, y = th
    if x >= 0 and y >= 0:
        a, b = (x, y), (0.0, 0.0)
    elif x >= 0:
        a, b = (x, 0.0), (0.0, y)
    elif y >= 0:
        a, b = (0.0, y), (x, 0.0)
    else:
        a, b = (0.0, 0.0), (x, y)
    return np.kron(_mode(sigma2, truncation, *a), _mode(sigma2, truncation, *b))


def gaussian_singular_submodel(kind, sigma2, truncation=24):
    """Two-mode piecewise submodels that are kinked at the origin.

    ``kind="scalar"``: the P-displacement ``theta`` sits on mode 1 for
    ``theta >= 0`` and on mode 2 for ``theta < 0``.

    ``kind="vector"``: quadrant by quadrant,

    ========================  =================================
    ``theta1>=0, theta2>=0``  ``rho(theta1, theta2) x rho(0, 0)``
    ``theta1>=0, theta2<0``   ``rho(theta1, 0) x rho(0, theta2)``
    ``theta1<0, theta2>=0``   ``rho(0, theta2) x rho(theta1, 0)``
    ``theta1<0, theta2<0``    ``rho(0, 0) x rho(theta1, theta2)``
    ========================  =================================

    The seams use the non-negative branch; both branches agree there.
    ``truncation`` is per mode, so the dimension is ``(truncation+1)**2``.
    """
    n = (truncation + 1) ** 2
    if kind == "scalar":
        return ParametricModel(lambda th: _scalar_singular(sigma2, truncation, th),
                               dim=n, m=1, domain=(Interval(),), validate=False,
                               label=f"gaussian_singular(sigma2={sigma2}, N={truncation})")
    if kind == "vector":
        return ParametricModel(lambda th: _vector_singular(sigma2, truncation, th),
                               dim=n, m=2, domain=(Interval(), Interval()), validate=False,
                               label=f"gaussian_singular2(sigma2={sigma2}, N={truncation})")
    raise InvalidInputError(f"unknown submodel kind {kind!r}; use 'scalar' or 'vector'")
