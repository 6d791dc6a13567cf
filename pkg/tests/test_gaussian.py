import math

import numpy as np
import pytest

from qbound.bounds import info_scalar, log_derivative, multiparam_bound, qhcrk_bound
from qbound.exceptions import InadmissibleStepError, InvalidInputError, TruncationError
from qbound.gaussian import (
    GaussianParams,
    _mode,
    gaussian_fock_state,
    gaussian_info_constants,
    gaussian_model,
    gaussian_singular_submodel,
    quadratures,
)
from qbound.gaussian_bounds import (
    gaussian_2d_finite_delta_bound,
    gaussian_case2_bounds,
    gaussian_koike_bound,
    gaussian_koike_bound_matrix,
    gaussian_koike_bound_numeric,
    gaussian_overlap_trace,
)
from qbound.linalg import as_density_matrix, solve_sld
from qbound.models import DifferenceSpec, Interval, ParametricModel, coordinate


def fock_overlap(x, y, z, w, sigma2, N=60):
    r0 = gaussian_fock_state(GaussianParams(sigma2, (0, 0), N))[0]
    r1 = gaussian_fock_state(GaussianParams(sigma2, (x, y), N))[0]
    r2 = gaussian_fock_state(GaussianParams(sigma2, (z, w), N))[0]
    return np.sum(np.diag(r1 @ r2) / np.diag(r0).real)


def test_coherent_vacuum():
    rho, tail = gaussian_fock_state(GaussianParams(0.5, (0, 0), 10))
    assert rho[0, 0] == pytest.approx(1.0)
    assert np.trace(rho @ rho).real == pytest.approx(1.0)


def test_thermal_state_populations():
    rho, tail = gaussian_fock_state(GaussianParams(1.0, (0, 0), 60))
    q = 1 / 3  # mean photon number 1/2
    n = np.arange(61)
    assert np.allclose(np.diag(rho).real, (1 - q) * q ** n / (1 - q ** 61), atol=1e-15)
    assert tail < 1e-8
    assert np.count_nonzero(rho - np.diag(np.diag(rho))) == 0


@pytest.mark.parametrize("mean", [(0.3, -0.7), (-1.0, 1.0), (0.0, 0.5)])
def test_quadrature_means(mean):
    rho, _ = gaussian_fock_state(GaussianParams(1.0, mean, 60))
    as_density_matrix(rho)
    P, Q = quadratures(60)
    assert np.trace(rho @ P).real == pytest.approx(mean[0], abs=1e-6)
    assert np.trace(rho @ Q).real == pytest.approx(mean[1], abs=1e-6)
    assert np.trace(rho @ Q @ Q).real - mean[1] ** 2 == pytest.approx(1.0, abs=1e-6)


def test_truncation_error():
    with pytest.raises(TruncationError):
        gaussian_fock_state(GaussianParams(5.0, (0, 0), 10))
    with pytest.raises(InvalidInputError):
        GaussianParams(0.4)


def test_info_constants():
    c = gaussian_info_constants(1.0)
    assert c.J == pytest.approx(4 / 3) and c.A == pytest.approx(2 / 3)
    assert np.allclose(c.rld_matrix(), c.rld_matrix().conj().T)
    big = gaussian_info_constants(1e4)
    assert big.J * 1e4 == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(InvalidInputError):
        gaussian_info_constants(0.5)


@pytest.mark.parametrize("sigma2", [0.75, 1.0, 2.0])
def test_sld_information_coordinate(sigma2):
    model = gaussian_model(sigma2, 60)
    assert info_scalar(model, (0.1, -0.2), None, "sld").value == pytest.approx(1 / sigma2, abs=1e-4)


def test_singular_submodel_branches():
    s = gaussian_singular_submodel("scalar", 1.0, 16)
    r0 = _mode(1.0, 16, 0.0, 0.0)
    assert np.allclose(s.state(0.0), np.kron(r0, r0))
    assert np.allclose(s.state(0.3), np.kron(_mode(1.0, 16, 0.3, 0.0), r0))
    assert np.allclose(s.state(-0.3), np.kron(r0, _mode(1.0, 16, -0.3, 0.0)))
    v = gaussian_singular_submodel("vector", 1.0, 16)
    want = np.kron(_mode(1.0, 16, 0.2, 0.0), _mode(1.0, 16, 0.0, -0.1))
    assert np.allclose(v.state((0.2, -0.1)), want)
    for eps in (1e-9, -1e-9):
        assert np.allclose(s.state(eps), s.state(0.0), atol=1e-8)
    with pytest.raises(InvalidInputError):
        gaussian_singular_submodel("matrix", 1.0)


def test_overlap_trace_examples():
    assert gaussian_overlap_trace(0, 0, 0, 0, 1.0) == 1
    J = gaussian_info_constants(2.0).J
    val = gaussian_overlap_trace(0.2, -0.3, 0.2, -0.3, 2.0)
    assert val.imag == 0 and val.real == pytest.approx(math.exp(J * 0.13))
    got = gaussian_overlap_trace(0.3, 0.0, 0.2, 0.1, 1.0)
    assert abs(got - fock_overlap(0.3, 0.0, 0.2, 0.1, 1.0)) < 1e-4
    # a real exponent would be far off
    c = gaussian_info_constants(1.0)
    real_reading = math.exp(c.J * 0.06 - c.A * 0.03)
    assert abs(real_reading - fock_overlap(0.3, 0.0, 0.2, 0.1, 1.0)) > 1e-2


def test_koike_closed_form_vs_matrix():
    for theta in np.linspace(-1.5, 1.5, 10):
        for d in np.linspace(0.1, 2.5, 10):
            a = gaussian_koike_bound(theta, d, 1.0)
            b = gaussian_koike_bound_matrix(theta, d, 1.0)
            assert abs(a - b) < 1e-8 * max(1.0, a)


def test_koike_closed_form_vs_fock_rld():
    for d in (0.5, 1.0):
        assert gaussian_koike_bound_numeric(1.0, d, 1.0, "rld") == pytest.approx(
            gaussian_koike_bound(1.0, d, 1.0), abs=1e-6)


def test_koike_grid_maximum_and_limits():
    J = gaussian_info_constants(1.0).J
    grid = np.arange(1, 61) * 0.05
    vals = [gaussian_koike_bound(1.0, d, 1.0) for d in grid]
    assert min(vals) > 1 / J
    assert max(vals) == pytest.approx(0.8488, abs=1e-3)
    assert grid[int(np.argmax(vals))] == pytest.approx(0.7)
    small = gaussian_koike_bound(0.0, 1e-4, 1.0)
    assert small > 1 / J
    with pytest.raises(InadmissibleStepError):
        gaussian_koike_bound(1.0, 0.0, 1.0)


def test_sld_koike_exceeds_derivative_bound():
    assert gaussian_koike_bound_numeric(1.0, 0.75, 1.0, "sld") > 1.0


def test_case2_examples():
    assert gaussian_case2_bounds(0.0, 0.5)[0] == pytest.approx(2.0)
    assert gaussian_case2_bounds(0.3, 0.5)[0] == pytest.approx(0.0, abs=1e-15)
    for s2 in (0.75, 1.0, 5.0):
        assert gaussian_case2_bounds(0.0, s2)[0] == pytest.approx(2 * s2 + 1)
    t = np.linspace(0, 1, 1001)
    rld = [gaussian_case2_bounds(x, 50.0)[0] for x in t]
    assert abs(t[int(np.argmax(rld))] - 0.5) < 0.02
    assert gaussian_case2_bounds(0.5, 1.0)[1] == pytest.approx(3.0)
    with pytest.raises(InvalidInputError):
        gaussian_case2_bounds(1.2, 1.0)


def test_2d_bound_examples():
    v = gaussian_2d_finite_delta_bound(-0.1, -0.1, 0.1, 0.1, 25.0)
    assert abs(v - 100) < 10
    a = gaussian_2d_finite_delta_bound(-0.3, -0.7, 0.4, 0.2, 1.0)
    b = gaussian_2d_finite_delta_bound(-0.7, -0.3, 0.2, 0.4, 1.0)
    assert a == pytest.approx(b, rel=1e-12)
    grid = [gaussian_2d_finite_delta_bound(x, y, -x, -y, 25.0)
            for x in (-0.5, -0.2, -0.05) for y in (-0.5, -0.2, -0.05)]
    assert max(grid) > 51
    assert gaussian_2d_finite_delta_bound(-1e-3, -1e-3, 1e-3, 1e-3, 1.0) == pytest.approx(6.0, rel=1e-3)
    with pytest.raises(InvalidInputError):
        gaussian_2d_finite_delta_bound(0.1, -0.1, 0.1, 0.1, 1.0)


def shifted_vector_model(theta, sigma2, N):
    """Vector kinked submodel re-centred so the state at ``theta`` is diagonal."""
    base = gaussian_singular_submodel("vector", sigma2, N)
    (a1, b1), (a2, b2) = _modes(theta)

    def state(th):
        (x1, y1), (x2, y2) = _modes(th)
        return np.kron(_mode(sigma2, N, x1 - a1, y1 - b1), _mode(sigma2, N, x2 - a2, y2 - b2))

    return ParametricModel(state, dim=base.dim, m=2, domain=(Interval(), Interval()),
                           validate=False, support_tol=0.0)


def _modes(th):
    x, y = th
    if x >= 0 and y >= 0:
        return (x, y), (0.0, 0.0)
    if x >= 0:
        return (x, 0.0), (0.0, y)
    if y >= 0:
        return (0.0, y), (x, 0.0)
    return (0.0, 0.0), (x, y)


@pytest.mark.parametrize("theta,ts", [((-0.3, -0.2), (0.3, 0.2)), ((-0.5, -0.4), (0.2, 0.6))])
def test_2d_bound_vs_fock(theta, ts):
    model = shifted_vector_model(theta, 1.0, 20)
    spec = DifferenceSpec((ts[0] - theta[0], ts[1] - theta[1]), (1.0, 1.0))
    num = multiparam_bound(model, theta, np.eye(2), spec, "rld").value
    assert num == pytest.approx(gaussian_2d_finite_delta_bound(*theta, *ts, 1.0), rel=1e-6)


def test_scalar_kink_sld_bound():
    model = gaussian_singular_submodel("scalar", 1.0, 24)
    rep = qhcrk_bound(model, 0.0, coordinate(), DifferenceSpec(0.0, 0.5), "sld")
    assert rep.value == pytest.approx(2.0, abs=1e-6)


def test_one_sided_identity_on_gaussian_kink():
    N = 20
    model = gaussian_singular_submodel("scalar", 1.0, N)
    h = 1e-5
    r0 = _mode(1.0, N, 0.0, 0.0)
    d = (_mode(1.0, N, h, 0.0) - _mode(1.0, N, -h, 0.0)) / (2 * h)
    rho = model.state(0.0)
    Lp = solve_sld(rho, np.kron(d, r0))
    Lm = solve_sld(rho, np.kron(r0, d))
    for t in (0.0, 0.3, 1.0):
        L = log_derivative(model, 0.0, DifferenceSpec(0.0, t), "sld")
        assert np.allclose(L, t * Lp + (1 - t) * Lm, atol=1e-6)
