"""Parametric state models and difference operators.

A :class:`ParametricModel` maps a parameter point to a density matrix.
Difference quotients of states and of scalar estimands are the raw material
of every bound in :mod:`qbound.bounds`.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DomainError, InvalidInputError
from .linalg import SUPPORT_TOL, SupportedState, as_density_matrix

__all__ = [
    "DiscreteDomain",
    "DifferenceSpec",
    "Estimand",
    "Interval",
    "ParametricModel",
    "absolute_value",
    "as_point",
    "concurrence_model",
    "coordinate",
    "discrete_model",
    "discrete_state",
    "function_difference",
    "kth_difference",
    "kth_function_difference",
    "state_difference",
]


@dataclass(frozen=True)
class Interval:
    """A real interval; infinite ends allowed."""

    low: float = -np.inf
    high: float = np.inf
    closed_low: bool = False
    closed_high: bool = False

    def __contains__(self, x):
        lo_ok = x >= self.low if self.closed_low else x > self.low
        hi_ok = x <= self.high if self.closed_high else x < self.high
        return bool(lo_ok and hi_ok)


@dataclass(frozen=True)
class DiscreteDomain:
    """A finite set of isolated scalar parameter values."""

    points: Tuple[float, ...]
    atol: float = 1e-12

    def __post_init__(self):
        pts = tuple(sorted(float(p) for p in self.points))
        if not pts:
            raise InvalidInputError("a discrete domain needs at least one point")
        object.__setattr__(self, "points", pts)

    def __contains__(self, x):
        return any(abs(x - p) <= self.atol for p in self.points)

    def between(self, a, b):
        """Domain points strictly between ``a`` and ``b``."""
        lo, hi = min(a, b), max(a, b)
        return [p for p in self.points if lo + self.atol < p < hi - self.atol]


Domain = Union[DiscreteDomain, Sequence[Interval]]


def as_point(theta, m=1):
    """Coerce a scalar or sequence to a float vector of length ``m``."""
    pt = np.atleast_1d(np.asarray(theta, dtype=float)).ravel()
    if pt.shape != (m,):
        raise InvalidInputError(f"parameter point must have {m} coordinate(s), got {pt.shape[0]}")
    if not np.all(np.isfinite(pt)):
        raise InvalidInputError("parameter point has non-finite coordinates")
    return pt


@dataclass(frozen=True)
class ParametricModel:
    """A family of density matrices indexed by a real parameter vector.

    Parameters
    ----------
    state_fn : callable
        Maps a float vector of length ``m`` to a ``dim x dim`` density matrix.
    dim : int
        Hilbert space dimension (after any truncation).
    m : int
        Number of parameters.
    domain : DiscreteDomain or sequence of Interval, optional
        Discrete domains are only allowed for scalar models.  Defaults to
        the whole of ``R^m``.
    label : str
    validate : bool
        Check the density matrix invariants of every state produced.
    cache_size : int
        Number of states memoized; differences revisit the same points often.
    support_tol : float
        Eigenvalues at or below this are treated as outside the support.
    """

    state_fn: Callable[[np.ndarray], np.ndarray]
    dim: int
    m: int = 1
    domain: Optional[Domain] = None
    label: str = "model"
    validate: bool = True
    cache_size: int = 64
    support_tol: float = SUPPORT_TOL
    _cached: Callable = field(init=False, repr=False, compare=False)
    _support: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", (Interval(),) * self.m)
        if isinstance(self.domain, Interval):
            object.__setattr__(self, "domain", (self.domain,))
        if isinstance(self.domain, DiscreteDomain):
            if self.m != 1:
                raise InvalidInputError("discrete domains are only supported for scalar models")
        elif len(self.domain) != self.m:
            raise InvalidInputError("need one interval per parameter coordinate")
        else:
            object.__setattr__(self, "domain", tuple(self.domain))

        def build(key):
            rho = np.asarray(self.state_fn(np.array(key)), dtype=complex)
            if rho.shape != (self.dim, self.dim):
                raise InvalidInputError(
                    f"{self.label}: state has shape {rho.shape}, expected ({self.dim}, {self.dim})")
            rho = as_density_matrix(rho) if self.validate else 0.5 * (rho + rho.conj().T)
            rho.setflags(write=False)
            return rho

        object.__setattr__(self, "_cached", lru_cache(maxsize=self.cache_size)(build))
        object.__setattr__(self, "_support", lru_cache(maxsize=8)(
            lambda key: SupportedState(self._cached(key), self.support_tol)))

    @property
    def is_discrete(self):
        return isinstance(self.domain, DiscreteDomain)

    def contains(self, theta):
        pt = as_point(theta, self.m)
        if self.is_discrete:
            return pt[0] in self.domain
        return all(x in iv for x, iv in zip(pt, self.domain))

    def state(self, theta):
        """Density matrix at ``theta``; raises DomainError outside the domain."""
        pt = as_point(theta, self.m)
        if not self.contains(pt):
            raise DomainError(f"{self.label}: parameter {pt.tolist()} outside the model domain")
        return self._cached(tuple(float(x) for x in pt))

    def support(self, theta):
        """Memoized :class:`~qbound.linalg.SupportedState` of the state at ``theta``."""
        self.state(theta)
        return self._support(tuple(float(x) for x in as_point(theta, self.m)))


@dataclass(frozen=True)
class Estimand:
    """A real function ``g(theta)`` to be estimated."""

    fn: Callable[[np.ndarray], float]
    label: str = "g"

    def __call__(self, theta):
        return float(self.fn(np.atleast_1d(np.asarray(theta, dtype=float))))


def coordinate(i=0):
    return Estimand(lambda th: th[i], f"theta[{i}]")


def absolute_value(i=0):
    return Estimand(lambda th: abs(th[i]), f"|theta[{i}]|")


@dataclass(frozen=True)
class DifferenceSpec:
    """Configuration of a difference quotient.

    ``delta`` is the step (one per coordinate for vector models) and ``t`` the
    split weight: the quotient is ``(f(x + t*delta) - f(x - (1-t)*delta)) / delta``.
    A zero step means the one-sided limit ``delta -> 0+``, evaluated by
    Richardson extrapolation from steps ``limit_step`` and ``limit_step / 2``.
    With ``t = 1/2`` that limit is the ordinary derivative.
    """

    delta: Union[float, Sequence[float]] = 0.0
    t: Union[float, Sequence[float]] = 1.0
    limit_step: float = 1e-5

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        if np.any((t < 0) | (t > 1)):
            raise InvalidInputError("split weight t must lie in [0, 1]")
        if not np.all(np.isfinite(d)):
            raise InvalidInputError("difference step must be finite")
        if self.limit_step <= 0:
            raise InvalidInputError("limit_step must be positive")

    @classmethod
    def derivative(cls, limit_step=1e-5):
        return cls(0.0, 0.5, limit_step)

    def component(self, i, m):
        """Scalar ``(delta, t)`` for coordinate ``i`` of an ``m``-parameter model."""
        d = np.broadcast_to(np.atleast_1d(np.asarray(self.delta, dtype=float)), (m,))
        t = np.broadcast_to(np.atleast_1d(np.asarray(self.t, dtype=float)), (m,))
        return float(d[i]), float(t[i])

    def is_limit(self, i=0, m=1):
        return self.component(i, m)[0] == 0.0

    def to_dict(self):
        d = np.atleast_1d(np.asarray(self.delta, dtype=float)).tolist()
        t = np.atleast_1d(np.asarray(self.t, dtype=float)).tolist()
        return {
            "delta": d[0] if len(d) == 1 else d,
            "t": t[0] if len(t) == 1 else t,
            "limit": bool(np.all(np.asarray(d) == 0.0)),
        }


def _two_point(f, pt, i, delta, t):
    e = np.zeros_like(pt)
    e[i] = 1.0
    return (f(pt + t * delta * e) - f(pt - (1.0 - t) * delta * e)) / delta


def _difference(f, pt, spec, i, m):
    delta, t = spec.component(i, m)
    if delta != 0.0:
        return _two_point(f, pt, i, delta, t)
    h = spec.limit_step
    # the first-order error term cancels; exact for piecewise-quadratic maps
    return 2.0 * _two_point(f, pt, i, h / 2, t) - _two_point(f, pt, i, h, t)


def state_difference(model, theta, spec, coord=0):
    """Difference quotient of the state along one coordinate.

    Returns ``(rho(theta + t*delta*e) - rho(theta - (1-t)*delta*e)) / delta``,
    or its ``delta -> 0+`` limit when ``spec.delta`` is zero.
    """
    pt = as_point(theta, model.m)
    if not 0 <= coord < model.m:
        raise InvalidInputError(f"coordinate {coord} out of range for m={model.m}")
    D = _difference(model.state, pt, spec, coord, model.m)
    return 0.5 * (D + D.conj().T)


def function_difference(g, theta, spec, coord=0, m=None):
    """Scalar version of :func:`state_difference` for an estimand."""
    pt = np.atleast_1d(np.asarray(theta, dtype=float))
    m = len(pt) if m is None else m
    return float(_difference(g, pt, spec, coord, m))


def _kth(f, pt, delta, k, coord=0):
    if k < 1:
        raise InvalidInputError("difference order must be a positive integer")
    if delta == 0:
        raise InvalidInputError("k-th difference needs a nonzero step")
    e = np.zeros_like(pt)
    e[coord] = 1.0
    total = 0
    for i in range(k + 1):
        total = total + (-1) ** i * comb(k, i) * f(pt + i * delta * e)
    return (-1) ** k * total / delta ** k


def kth_difference(model, theta, delta, k, coord=0):
    """Order-``k`` forward difference ``(-1)^k delta^-k sum_i (-1)^i C(k,i) rho(theta + i delta)``."""
    pt = as_point(theta, model.m)
    D = _kth(model.state, pt, float(delta), int(k), coord)
    return 0.5 * (D + D.conj().T)


def kth_function_difference(g, theta, delta, k, coord=0):
    pt = np.atleast_1d(np.asarray(theta, dtype=float))
    return float(_kth(g, pt, float(delta), int(k), coord))


# --- example families -------------------------------------------------------

def concurrence_model():
    """Bell-diagonal qubit pair on the span of the two Bell states Phi+ and Phi-.

    ``rho = diag((1 + theta)/2, (1 - theta)/2)`` for ``-1 < theta < 1``; the
    concurrence of the full two-qubit state is ``|theta|``.
    """
    def state(th):
        x = th[0]
        return np.diag([(1 + x) / 2, (1 - x) / 2]).astype(complex)

    return ParametricModel(state, dim=2, m=1, domain=(Interval(-1.0, 1.0),),
                           label="concurrence")


_SIGMA1 = np.array([[1.0, 0.0], [0.0, 0.0]])
_SIGMA2 = np.array([[1.0, 0.5], [0.5, 1.0]])


def _discrete_min_dim(theta):
    return 2 * (-(-theta // 2)) + 2


def discrete_state(theta, dim_cut):
    """State of the block-diagonal discrete family at integer ``theta >= 1``.

    Even ``theta``: ``theta/2`` copies of ``[[1, 1/2], [1/2, 1]]`` scaled by
    ``1/theta``.  Odd ``theta``: ``(theta-1)/2`` such blocks followed by
    ``diag(1, 0)``.  The remaining ``dim_cut`` dimensions are empty.
    """
    if int(theta) != theta or theta < 1:
        raise DomainError(f"discrete model needs a positive integer parameter, got {theta}")
    theta = int(theta)
    if dim_cut < _discrete_min_dim(theta):
        raise InvalidInputError(
            f"dim_cut={dim_cut} too small for theta={theta}; need {_discrete_min_dim(theta)}")
    rho = np.zeros((dim_cut, dim_cut), dtype=complex)
    for b in range(theta // 2):
        rho[2 * b:2 * b + 2, 2 * b:2 * b + 2] = _SIGMA2
    if theta % 2:
        b = theta // 2
        rho[2 * b:2 * b + 2, 2 * b:2 * b + 2] = _SIGMA1
    return rho / theta


def discrete_model(dim_cut):
    """The discrete family on ``theta = 1, ..., dim_cut - 2`` (``dim_cut`` even, >= 4)."""
    if dim_cut < 4 or dim_cut % 2:
        raise InvalidInputError("dim_cut must be even and at least 4")
    pts = tuple(range(1, dim_cut - 1))
    return ParametricModel(lambda th: discrete_state(int(round(th[0])), dim_cut),
                           dim=dim_cut, m=1, domain=DiscreteDomain(pts),
                           label=f"discrete(dim_cut={dim_cut})")
