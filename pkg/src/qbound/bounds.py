"""Lower bounds on the mean square error of unbiased estimators.

Difference versions of the SLD/RLD Cramer-Rao inequality (scalar and vector
parameter), the Koike-type bound built from higher order differences,
asymptotic exponents for discrete models and the quantum relative entropy
they are compared against.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import DomainError, InvalidInputError, SingularSupportError
from .linalg import SupportedState, pinv_rank, spabs
from .models import (
    DifferenceSpec,
    as_point,
    function_difference,
    kth_difference,
    kth_function_difference,
    state_difference,
)

__all__ = [
    "BoundReport",
    "InfoScalar",
    "PINV_TOL",
    "asymptotic_continuous_bound",
    "asymptotic_rld_info",
    "discrete_asymptotic_exponent",
    "gram_bound",
    "info_matrix",
    "info_scalar",
    "log_derivative",
    "multiparam_bound",
    "qcr_bound",
    "qhcrk_bound",
    "qk_bound",
    "relative_entropy",
    "rld_info_via_trace",
    "tensor_power_rld_info",
]

PINV_TOL = 1e-10
FLAVORS = ("sld", "rld")


def _flavor(flavor):
    f = str(flavor).lower()
    if f not in FLAVORS:
        raise InvalidInputError(f"flavor must be 'sld' or 'rld', got {flavor!r}")
    return f


def _spec(spec):
    return DifferenceSpec.derivative() if spec is None else spec


@dataclass
class InfoScalar:
    value: float
    flavor: str
    spec: Optional[DifferenceSpec]


@dataclass
class BoundReport:
    """Right-hand side of one inequality, ready to serialize.

    An infinite bound (zero information against a nonzero numerator) is
    reported as ``value=None`` with ``infinite=True``.
    """

    value: Optional[float]
    kind: str
    flavor: Optional[str] = None
    spec: Optional[dict] = None
    infinite: bool = False
    weight: Optional[list] = None
    theta: Optional[list] = None
    model: Optional[str] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": self.kind,
            "value": self.value,
            "infinite": self.infinite,
            "flavor": self.flavor,
            "spec": self.spec,
            "weight": self.weight,
            "theta": self.theta,
            "model": self.model,
            "diagnostics": self.diagnostics,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _ratio_report(num, den, kind, **kw):
    if den <= 0:
        if abs(num) > 0:
            return BoundReport(None, kind, infinite=True, **kw)
        return BoundReport(0.0, kind, **kw)
    return BoundReport(float(num / den), kind, **kw)


def _reduced_log_derivatives(state, diffs, flavor):
    Lts = []
    for D in diffs:
        Dt = state.reduce(D, "state difference")
        Lts.append(state.sld_reduced(Dt) if flavor == "sld" else state.rld_reduced(Dt))
    return Lts


def _gram(state, Lts, flavor):
    return state.sld_gram(Lts) if flavor == "sld" else state.rld_gram(Lts)


def log_derivative(model, theta, spec=None, flavor="sld", coord=0):
    """Difference SLD or RLD operator along ``coord`` (full-space matrix)."""
    flavor = _flavor(flavor)
    state = model.support(theta)
    D = state_difference(model, theta, _spec(spec), coord)
    (Lt,) = _reduced_log_derivatives(state, [D], flavor)
    return state.lift(Lt)


def info_scalar(model, theta, spec=None, flavor="sld", coord=0):
    """``Tr rho L^2`` (SLD) or ``Tr rho L L^dagger`` (RLD) for the difference spec.

    ``spec=None`` gives the derivative (central difference with one
    Richardson step), i.e. the usual quantum Fisher information.
    """
    flavor = _flavor(flavor)
    spec = _spec(spec)
    state = model.support(theta)
    D = state_difference(model, theta, spec, coord)
    Lts = _reduced_log_derivatives(state, [D], flavor)
    value = float(np.real(_gram(state, Lts, flavor)[0, 0]))
    return InfoScalar(max(value, 0.0), flavor, spec)


def info_matrix(model, theta, spec=None, flavor="sld"):
    """``m x m`` information matrix built from per-coordinate differences.

    SLD: ``(1/2) Tr rho {L_i, L_j}`` (real symmetric).
    RLD: ``Tr rho L_j L_i^dagger`` (Hermitian).
    """
    flavor = _flavor(flavor)
    spec = _spec(spec)
    state = model.support(theta)
    diffs = [state_difference(model, theta, spec, i) for i in range(model.m)]
    return _gram(state, _reduced_log_derivatives(state, diffs, flavor), flavor)


def rld_info_via_trace(model, theta, delta):
    """``(Tr rho_theta^-1 rho_{theta+delta}^2 - 1) / delta^2``.

    Equal to the forward-difference RLD information; computed without
    forming the log derivative.
    """
    if delta == 0:
        raise InvalidInputError("delta must be nonzero")
    pt = as_point(theta, model.m)
    if model.m != 1:
        raise InvalidInputError("rld_info_via_trace is defined for scalar models")
    state = model.support(pt)
    sigma = state.reduce(model.state(pt + delta), "shifted state")
    overlap = np.real(np.sum(sigma * sigma.T / state.eigenvalues[:, None]))
    return InfoScalar(float((overlap - 1.0) / delta ** 2), "rld", DifferenceSpec(delta, 1.0))


def _base_kw(model, theta, flavor, spec):
    return {
        "flavor": flavor,
        "spec": None if spec is None else spec.to_dict(),
        "theta": as_point(theta, model.m).tolist(),
        "model": model.label,
    }


def qhcrk_bound(model, theta, g, spec=None, flavor="sld"):
    """``(Delta^t_delta g)^2 / J^{flavor,t}_{theta,delta}`` for an unbiased estimator of ``g``."""
    flavor = _flavor(flavor)
    spec = _spec(spec)
    dg = function_difference(g, theta, spec, 0, model.m)
    info = info_scalar(model, theta, spec, flavor)
    rep = _ratio_report(dg ** 2, info.value, "QHCRK", **_base_kw(model, theta, flavor, spec))
    rep.diagnostics = {"info": info.value, "difference_g": dg}
    return rep


def qcr_bound(model, theta, g, flavor="sld"):
    """Derivative bound ``g'(theta)^2 / J``; requires a differentiable model."""
    rep = qhcrk_bound(model, theta, g, DifferenceSpec.derivative(), flavor)
    rep.kind = "QCR"
    return rep


def _quadratic_form(K, v, tol=PINV_TOL):
    """``v^dagger K^+ v`` plus diagnostics; infinite when ``v`` leaves range(K)."""
    Kp, rank = pinv_rank(K, tol)
    s = np.linalg.svd(K, compute_uv=False)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else math.inf
    diag = {"pinv_rank": rank, "size": len(v),
            "condition": cond if math.isfinite(cond) else None}
    resid = np.linalg.norm(K @ (Kp @ v) - v)
    if resid > 1e-8 * max(1.0, np.linalg.norm(v)):
        diag["range_residual"] = float(resid)
        return None, diag
    return float(np.real(np.conj(v) @ Kp @ v)), diag


def qk_bound(model, theta, g, delta, r, flavor="sld"):
    """Koike-type bound ``v^T K^+ v`` from forward differences of orders ``1..r``.

    ``K`` is the Gram matrix of the order-``k`` difference log derivatives
    (symmetrized for the SLD flavor) and ``v_k`` the order-``k`` difference
    of ``g``.  A Moore-Penrose inverse is used; rank is reported.
    """
    flavor = _flavor(flavor)
    if r < 1:
        raise InvalidInputError("r must be at least 1")
    pt = as_point(theta, model.m)
    state = model.support(pt)
    diffs = [kth_difference(model, pt, delta, k) for k in range(1, r + 1)]
    K = _gram(state, _reduced_log_derivatives(state, diffs, flavor), flavor)
    v = np.array([kth_function_difference(g, pt, delta, k) for k in range(1, r + 1)])
    value, diag = _quadratic_form(K, v)
    kw = _base_kw(model, pt, flavor, None)
    kw["spec"] = {"delta": float(delta), "order": int(r)}
    return BoundReport(value, "QK", infinite=value is None, diagnostics=diag, **kw)


def gram_bound(model, theta, g, specs, flavor="sld"):
    """Koike-type bound from an arbitrary list of first-order difference specs.

    Each spec contributes one difference log derivative ``L_k`` and one entry
    ``Delta_k g`` of ``v``; the bound is ``v^T K^+ v``.  With a single spec it
    is the difference Cramer-Rao bound.
    """
    flavor = _flavor(flavor)
    pt = as_point(theta, model.m)
    state = model.support(pt)
    diffs = [state_difference(model, pt, s, 0) for s in specs]
    K = _gram(state, _reduced_log_derivatives(state, diffs, flavor), flavor)
    v = np.array([function_difference(g, pt, s, 0, model.m) for s in specs])
    value, diag = _quadratic_form(K, v)
    kw = _base_kw(model, pt, flavor, None)
    kw["spec"] = {"steps": [s.to_dict() for s in specs]}
    return BoundReport(value, "QK", infinite=value is None, diagnostics=diag, **kw)


def multiparam_bound(model, theta, G=None, spec=None, flavor="sld"):
    """Weighted-trace bound on ``Sp G V`` for unbiased estimators of all coordinates.

    SLD: ``Sp G J^-1``.  RLD: ``Sp G J^-1 + Spabs Im G J^-1``.  ``spec=None``
    uses derivatives; a :class:`DifferenceSpec` with per-coordinate ``delta``
    and ``t`` gives the difference version.
    """
    flavor = _flavor(flavor)
    spec = _spec(spec)
    m = model.m
    G = np.eye(m) if G is None else np.asarray(G, dtype=float)
    if G.shape != (m, m) or not np.allclose(G, G.T):
        raise InvalidInputError(f"weight G must be a real symmetric {m}x{m} matrix")
    if np.linalg.eigvalsh(G)[0] < -1e-12:
        raise InvalidInputError("weight G must be positive semidefinite")
    J = info_matrix(model, theta, spec, flavor)
    Jinv, rank = pinv_rank(J, PINV_TOL)
    diag = {"pinv_rank": rank, "info_matrix": _complex_list(J)}
    kw = _base_kw(model, theta, flavor, spec)
    kw["weight"] = G.tolist()
    if rank < m:
        null = np.eye(m) - J @ Jinv
        if np.linalg.norm(null.conj().T @ G @ null) > 1e-9 * max(1.0, np.linalg.norm(G)):
            return BoundReport(None, "MULTI", infinite=True, diagnostics=diag, **kw)
    GJ = G @ Jinv
    value = float(np.real(np.trace(GJ)))
    if flavor == "rld":
        correction = spabs(np.imag(GJ))
        diag["spabs_correction"] = correction
        value += correction
    return BoundReport(value, "MULTI", diagnostics=diag, **kw)


def _complex_list(M):
    M = np.asarray(M)
    if np.iscomplexobj(M) and np.any(np.imag(M)):
        return [[[float(x.real), float(x.imag)] for x in row] for row in M]
    return np.real(M).tolist()


def tensor_power_rld_info(J1, n, delta, log=False):
    """Forward-difference RLD information of ``n`` copies: ``((1 + delta^2 J1)^n - 1) / delta^2``.

    With ``log=True`` the natural log of that value is returned, computed
    without overflow.  Without it, an ``OverflowError`` is raised once
    ``(1 + delta^2 J1)^n`` exceeds 1e300.
    """
    if n < 1 or int(n) != n:
        raise InvalidInputError("n must be a positive integer")
    if delta == 0:
        raise InvalidInputError("delta must be nonzero")
    if J1 < 0:
        raise InvalidInputError("J1 must be non-negative")
    x = delta ** 2 * J1
    growth = n * math.log1p(x)
    if log:
        if x == 0:
            return -math.inf
        return growth + math.log(-math.expm1(-growth)) - 2 * math.log(abs(delta))
    if growth > math.log(1e300):
        raise OverflowError("tensor power information overflows; use log=True")
    return math.expm1(growth) / delta ** 2


def discrete_asymptotic_exponent(model, theta, delta):
    """Rate ``log(1 + delta^2 J^{R,1}_{theta,delta})`` bounding the MSE decay.

    ``theta`` and ``theta + delta`` must be neighbouring points of a discrete
    domain.  The MSE of any estimator that is weakly unbiased at both points
    cannot decay faster than ``exp(-n * rate)``.
    """
    if not model.is_discrete:
        raise InvalidInputError("discrete_asymptotic_exponent needs a discrete-domain model")
    th = float(as_point(theta)[0])
    other = th + delta
    if delta == 0 or th not in model.domain or other not in model.domain:
        raise DomainError(f"theta={th} and theta+delta={other} must both lie in the domain")
    if model.domain.between(th, other):
        raise DomainError(f"{th} and {other} are not adjacent domain points")
    info = info_scalar(model, th, DifferenceSpec(delta, 1.0), "rld")
    return math.log1p(delta ** 2 * info.value)


def relative_entropy(rho, sigma, support_tol=1e-12):
    """``D(rho || sigma) = Tr rho (log rho - log sigma)`` in nats.

    Returns ``math.inf`` when ``rho`` has weight outside the support of
    ``sigma``.
    """
    p = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    p = p[p > support_tol]
    neg = float(np.sum(p * np.log(p)))
    state = SupportedState(sigma, support_tol)
    try:
        rt = state.reduce(rho, "rho")
    except SingularSupportError:
        return math.inf
    cross = float(np.real(np.sum(np.diag(rt) * np.log(state.eigenvalues))))
    return max(neg - cross, 0.0)


def asymptotic_continuous_bound(model, theta, g, t=1):
    """Right-hand side ``(g'_t)^2 / J^{R,t}`` of the asymptotic one-sided bound.

    ``t=1`` uses right limits, ``t=0`` left limits, for estimators that are
    sqrt(n)-unbiased from that side.  The RLD information is the one-sided
    derivative information.
    """
    if t not in (0, 1):
        raise InvalidInputError("t must be 0 (left) or 1 (right)")
    spec = DifferenceSpec(0.0, float(t))
    rep = qhcrk_bound(model, theta, g, spec, "rld")
    rep.kind = "ASYMPT_CONT"
    return rep


def asymptotic_rld_info(model, theta, h, n):
    """Finite-``n`` value of ``(1/n) * n-copy RLD information at step h/sqrt(n)``.

    Tends to ``(exp(h^2 J^R) - 1) / h^2`` as ``n`` grows, and to the one-sided
    RLD information ``J^R`` as ``h -> 0`` after that.
    """
    step = h / math.sqrt(n)
    J1 = info_scalar(model, theta, DifferenceSpec(step, 1.0), "rld").value
    return tensor_power_rld_info(J1, n, step) / n
