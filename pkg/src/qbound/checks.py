"""Acceptance checks, runnable from the command line or from pytest.

Each check recomputes one headline claim from scratch and compares it with
an independent oracle: a closed form, an exact evaluation, a brute-force
linear solve or a Monte Carlo estimate.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .bounds import (
    discrete_asymptotic_exponent,
    info_matrix,
    info_scalar,
    log_derivative,
    multiparam_bound,
    qcr_bound,
    qhcrk_bound,
    qk_bound,
    relative_entropy,
    rld_info_via_trace,
    tensor_power_rld_info,
)
from .estimators import (
    discrete_alternative_observable,
    discrete_optimal_observable,
    exact_bias_mse,
    simulate_concurrence_estimator,
)
from .exceptions import QBoundError
from .gaussian import (
    GaussianParams,
    gaussian_fock_state,
    gaussian_info_constants,
    gaussian_model,
    gaussian_singular_submodel,
)
from .gaussian_bounds import gaussian_overlap_trace
from .linalg import solve_sld
from .models import (
    DifferenceSpec,
    ParametricModel,
    absolute_value,
    concurrence_model,
    coordinate,
    discrete_model,
)
from .reproduce import FIG2_SIGMA2, column, discrete_closed_form_mse, fig1, fig2, fig3
from .serialization import load_model
from .testing import kinked_model, random_density, random_hermitian, smooth_model, two_point_model

__all__ = ["CHECKS", "CheckResult", "check_model", "run_checks"]

PROPERTY_INSTANCES = 500
ORACLE_INSTANCES = 100
SEED = 20240611


@dataclass
class CheckResult:
    key: str
    title: str
    passed: Optional[bool]
    detail: str
    seconds: float = 0.0

    @property
    def skipped(self):
        return self.passed is None

    def line(self):
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return f"[{status}] {self.key} {self.title}: {self.detail} ({self.seconds:.1f}s)"


@dataclass(frozen=True)
class Check:
    key: str
    title: str
    fn: Callable[[], tuple]
    monte_carlo: bool = False


def _worst(pairs):
    """Largest absolute difference over ``(got, want)`` pairs."""
    return max(abs(g - w) for g, w in pairs)


def concurrence_bound():
    model = concurrence_model()
    pairs = []
    for delta in (0.1, 0.5, 0.9):
        for flavor in ("sld", "rld"):
            rep = qhcrk_bound(model, 0.0, absolute_value(), DifferenceSpec(delta, 1.0), flavor)
            pairs.append((rep.value, 1.0))
    err = _worst(pairs)
    return err <= 1e-9, f"max |bound - 1| = {err:.2e} over 6 cases"


def concurrence_information():
    model = concurrence_model()
    pairs = []
    for theta in np.round(np.arange(-0.9, 0.91, 0.1), 12):
        for flavor in ("sld", "rld"):
            pairs.append((info_scalar(model, theta, None, flavor).value, 1 / (1 - theta ** 2)))
    err = _worst(pairs)
    return err <= 1e-9, f"max |J - 1/(1-theta^2)| = {err:.2e} over {len(pairs)} cases"


def two_step_estimator():
    start = time.perf_counter()
    parts, ok = [], True
    for theta in (0.0, 0.6):
        rep = simulate_concurrence_estimator(theta, 10 ** 4, 10 ** 4, seed=SEED)
        nmse, nse = rep.n_copies * rep.mse, rep.n_copies * rep.std_error
        z = abs(nmse - (1 - theta ** 2)) / nse
        ok &= z <= 3
        parts.append(f"theta={theta}: n*mse={nmse:.4f} ({z:.2f} se)")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    return ok, "; ".join(parts) + f"; {elapsed:.1f}s"


def discrete_exactness():
    dim_cut = 14
    model = discrete_model(dim_cut)
    pvm = discrete_optimal_observable(dim_cut).to_pvm()
    bias_err = mse_err = alt_err = 0.0
    for theta in range(2, 11):
        rep = exact_bias_mse(model, theta, coordinate(), pvm)
        bias_err = max(bias_err, abs(rep.bias))
        mse_err = max(mse_err, abs(rep.mse - discrete_closed_form_mse(theta)))
        if theta % 2:
            alt = discrete_alternative_observable(theta, dim_cut).to_pvm()
            rep = exact_bias_mse(model, theta, coordinate(), alt)
            alt_err = max(alt_err, abs(rep.mse - (theta ** 2 / 3 - 7 / 12 + 1 / (4 * theta))))
    ok = bias_err <= 1e-10 and mse_err <= 1e-9 and alt_err <= 1e-9
    return ok, f"|bias| {bias_err:.1e}, mse err {mse_err:.1e}, alternative mse err {alt_err:.1e}"


def koike_equality():
    model = discrete_model(10)
    pairs = []
    for theta in (2, 4, 6):
        rep = qk_bound(model, theta, coordinate(), -1.0, theta - 1, "sld")
        pairs.append((rep.value, discrete_closed_form_mse(theta)))
    err = _worst(pairs)
    return err <= 1e-8, f"max |QK - mse| = {err:.2e}"


def discrete_exponents():
    model = discrete_model(10)
    exp_pairs, ent_pairs, order_ok = [], [], True
    for theta in (2, 3, 4, 5, 6, 7):
        rate = discrete_asymptotic_exponent(model, theta, -1.0)
        want = math.log(theta / (theta - 1))
        if theta % 2 == 0:
            want += math.log((3 * theta - 2) / (3 * (theta - 1)))
            ent = relative_entropy(model.state(theta - 1), model.state(theta))
            ent_pairs.append((ent, math.log(theta / (theta - 1)) + math.log(2 / math.sqrt(3)) / (theta - 1)))
            order_ok &= ent <= rate
        exp_pairs.append((rate, want))
    e1, e2 = _worst(exp_pairs), _worst(ent_pairs)
    ok = e1 <= 1e-10 and e2 <= 1e-10 and order_ok
    return ok, f"exponent err {e1:.1e}, relative entropy err {e2:.1e}, D <= exponent: {order_ok}"


def gaussian_information():
    worst_s = worst_r = 0.0
    for s2 in (0.75, 1.0, 2.0):
        model = gaussian_model(s2, 60)
        JS = info_matrix(model, (0.0, 0.0), None, "sld")
        JR = info_matrix(model, (0.0, 0.0), None, "rld")
        want_s = np.eye(2) / s2
        want_r = gaussian_info_constants(s2).rld_matrix()
        worst_s = max(worst_s, np.max(np.abs(JS - want_s)) / np.max(np.abs(want_s)))
        worst_r = max(worst_r, np.max(np.abs(JR - want_r)) / np.max(np.abs(want_r)))
    ok = worst_s <= 1e-3 and worst_r <= 1e-3
    return ok, f"relative err SLD {worst_s:.1e}, RLD {worst_r:.1e}"


def gaussian_multiparameter():
    parts, ok = [], True
    for s2 in (0.75, 1.0, 2.0):
        model = gaussian_model(s2, 60)
        sld = multiparam_bound(model, (0.0, 0.0), np.eye(2), None, "sld").value
        rld = multiparam_bound(model, (0.0, 0.0), np.eye(2), None, "rld").value
        e = max(abs(sld - 2 * s2), abs(rld - (2 * s2 + 1)))
        ok &= e <= 1e-3
        parts.append(f"sigma2={s2}: err {e:.1e}")
    for s2 in (0.75, 1.0):
        model = gaussian_singular_submodel("vector", s2, 24)
        spec = DifferenceSpec((0.0, 0.0), (0.5, 0.5))
        v = multiparam_bound(model, (0.0, 0.0), np.eye(2), spec, "rld").value
        e = abs(v - (4 * s2 + 2))
        ok &= e <= 1e-3
        parts.append(f"kink sigma2={s2}: {v:.6f} vs {4 * s2 + 2}")
    return ok, "; ".join(parts)


def fock_overlap_trace(x, y, z, w, sigma2, truncation=60):
    """``Tr rho_0^-1 rho_(x,y) rho_(z,w)`` summed in the Fock basis."""
    rho0 = gaussian_fock_state(GaussianParams(sigma2, (0.0, 0.0), truncation))[0]
    r1 = gaussian_fock_state(GaussianParams(sigma2, (x, y), truncation))[0]
    r2 = gaussian_fock_state(GaussianParams(sigma2, (z, w), truncation))[0]
    return complex(np.sum(np.diag(r1 @ r2) / np.diag(rho0).real))


def overlap_identity():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for k in range(20):
        s2 = (1.0, 2.0)[k % 2]
        x, y, z, w = rng.uniform(-0.5, 0.5, size=4)
        worst = max(worst, abs(gaussian_overlap_trace(x, y, z, w, s2) - fock_overlap_trace(x, y, z, w, s2)))
    return worst <= 1e-4, f"max |closed form - Fock sum| = {worst:.1e} over 20 tuples"


def figure_claims():
    t1 = fig1(include_sld=False)
    f1 = column(t1, "bound").max()
    t2 = fig2()
    tt, ss, rr = column(t2, "t2"), column(t2, "sigma2"), column(t2, "rld_bound")
    arg = {s: tt[ss == s][np.argmax(rr[ss == s])] for s in FIG2_SIGMA2}
    t3 = fig3()
    region = int(np.sum(column(t3, "bound_a") > column(t3, "bound_b")))
    ok1, ok2, ok3 = f1 > 1.0, arg[0.5] == 0.0 and abs(arg[50.0] - 0.5) <= 0.06, region > 0
    detail = (f"fig1 max bound {f1:.4f} (> 1: {ok1}); fig2 argmax t2 {arg[0.5]} at sigma2=1/2, "
              f"{arg[50.0]} at 50 ({ok2}); fig3 cells with a > b: {region} ({ok3})")
    return ok1 and ok2 and ok3, detail


def _random_spec(rng):
    return DifferenceSpec(float(rng.choice([-1, 1]) * rng.uniform(0.05, 0.6)),
                          float(rng.uniform(0, 1)))


def property_suites():
    rng = np.random.default_rng(SEED)
    n = PROPERTY_INSTANCES
    slack = 1e-7
    bad = dict.fromkeys(["ordering", "koike", "qcr", "entropy", "one_sided"], 0)
    g = coordinate()
    for _ in range(n):
        dim = int(rng.integers(2, 7))
        model = smooth_model(rng, dim)
        theta = float(rng.uniform(-1, 1))
        spec = _random_spec(rng)
        s = qhcrk_bound(model, theta, g, spec, "sld").value
        r = qhcrk_bound(model, theta, g, spec, "rld").value
        if s < r - slack * max(1.0, abs(r)):
            bad["ordering"] += 1

        delta = float(rng.choice([-1, 1]) * rng.uniform(0.1, 0.5))
        vals = [qk_bound(model, theta, g, delta, k, "sld").value for k in (1, 2, 3)]
        if any(b < a - slack * max(1.0, abs(a)) for a, b in zip(vals, vals[1:])):
            bad["koike"] += 1

        exact = qcr_bound(model, theta, g).value
        near = qhcrk_bound(model, theta, g, DifferenceSpec(1e-4, 0.5)).value
        if abs(near - exact) > 1e-3 * exact:
            bad["qcr"] += 1

        rho, sigma = random_density(rng, dim, min_eig=0.01), random_density(rng, dim, min_eig=0.01)
        pair = two_point_model(rho, sigma, 0.0, delta)
        J1 = rld_info_via_trace(pair, 0.0, delta).value
        if relative_entropy(sigma, rho) > math.log1p(delta ** 2 * J1) + slack:
            bad["entropy"] += 1

        kinked, Dp, Dm = kinked_model(rng, dim)
        t = float(rng.uniform(0, 1))
        L = log_derivative(kinked, 0.0, DifferenceSpec(0.0, t), "sld")
        rho0 = kinked.state(0.0)
        want = t * solve_sld(rho0, Dp) + (1 - t) * solve_sld(rho0, Dm)
        if np.max(np.abs(L - want)) > slack * max(1.0, np.max(np.abs(want))):
            bad["one_sided"] += 1
    ok = not any(bad.values())
    return ok, f"{n} instances each, violations {bad}"


def _vectorized_sld(rho, D):
    """Solve ``(rho L + L rho)/2 = D`` as one linear system on row-major ``vec(L)``."""
    d = len(rho)
    I = np.eye(d)
    A = 0.5 * (np.kron(rho, I) + np.kron(I, rho.T))
    return np.linalg.solve(A, D.reshape(-1)).reshape(d, d)


def oracle_equivalence():
    rng = np.random.default_rng(SEED + 1)
    n = ORACLE_INSTANCES
    e_sld = e_trace = e_tensor = 0.0
    for _ in range(n):
        dim = int(rng.integers(2, 7))
        rho = random_density(rng, dim, min_eig=0.02)
        D = random_hermitian(rng, dim)
        L = solve_sld(rho, D)
        e_sld = max(e_sld, np.max(np.abs(L - _vectorized_sld(rho, D))) / max(1.0, np.max(np.abs(L))))

        model = smooth_model(rng, dim)
        theta = float(rng.uniform(-1, 1))
        delta = float(rng.choice([-1, 1]) * rng.uniform(0.05, 0.6))
        a = rld_info_via_trace(model, theta, delta).value
        b = info_scalar(model, theta, DifferenceSpec(delta, 1.0), "rld").value
        e_trace = max(e_trace, abs(a - b) / max(1.0, abs(b)))

        qubit = smooth_model(rng, 2)
        two = ParametricModel(lambda th, q=qubit: np.kron(q.state(th), q.state(th)),
                              dim=4, validate=False, label="two copies")
        J1 = info_scalar(qubit, theta, DifferenceSpec(delta, 1.0), "rld").value
        J2 = info_scalar(two, theta, DifferenceSpec(delta, 1.0), "rld").value
        e_tensor = max(e_tensor, abs(tensor_power_rld_info(J1, 2, delta) - J2) / max(1.0, J2))
    ok = max(e_sld, e_trace, e_tensor) <= 1e-8
    return ok, (f"{n} instances: solve_sld vs linear system {e_sld:.1e}, "
                f"trace formula vs RLD info {e_trace:.1e}, two-copy {e_tensor:.1e}")


CHECKS = [
    Check("C1", "concurrence difference bound equals 1 - theta^2", concurrence_bound),
    Check("C2", "concurrence information equals 1/(1 - theta^2)", concurrence_information),
    Check("C3", "two-step estimator attains (1 - theta^2)/n", two_step_estimator, monte_carlo=True),
    Check("C4", "discrete estimator bias and MSE", discrete_exactness),
    Check("C5", "Koike bound attained at even theta", koike_equality),
    Check("C6", "discrete exponents and relative entropy", discrete_exponents),
    Check("C7", "Gaussian derivative information matrices", gaussian_information),
    Check("C8", "Gaussian multiparameter bounds", gaussian_multiparameter),
    Check("C9", "Gaussian overlap trace identity", overlap_identity),
    Check("C10", "figure claims", figure_claims),
    Check("C11", "randomized property suites", property_suites),
    Check("C12", "oracle equivalences", oracle_equivalence),
]


def check_model(path):
    """Load a model file and exercise it: every state valid, log derivatives solvable."""
    model = load_model(path)
    if not model.is_discrete:
        model.state(np.zeros(model.m))
        return model
    points = list(model.domain.points)
    for x in points:
        model.state(x)
    for a, b in zip(points, points[1:]):
        rld_info_via_trace(model, a, b - a)
    return model


def _run(key, title, fn):
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except (QBoundError, ArithmeticError, np.linalg.LinAlgError) as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(key, title, bool(ok), detail, time.perf_counter() - start)


def run_checks(quick=False, extra_models=(), only=None, report=None) -> List[CheckResult]:
    """Run the acceptance checks; ``quick`` skips the Monte Carlo ones.

    ``report`` is called with each result as soon as it is available.
    """
    results = []
    for chk in CHECKS:
        if only is not None and chk.key not in only:
            continue
        if quick and chk.monte_carlo:
            res = CheckResult(chk.key, chk.title, None, "skipped (quick mode)")
        else:
            res = _run(chk.key, chk.title, chk.fn)
        results.append(res)
        if report:
            report(res)
    for i, path in enumerate(extra_models, 1):
        res = _run(f"M{i}", f"model file {path}", lambda p=path: (check_model(p) is not None, "loads and validates"))
        results.append(res)
        if report:
            report(res)
    return results
