import json

import numpy as np
import pytest

from qbound.bounds import qhcrk_bound, qk_bound
from qbound.estimators import (
    Observable,
    Povm,
    discrete_alternative_observable,
    discrete_optimal_observable,
    exact_bias_mse,
    observable_to_pvm,
    simulate_concurrence_estimator,
    simulate_povm_sampling,
    trial_rng,
)
from qbound.exceptions import InconsistentPovmError, InvalidInputError
from qbound.models import (
    DifferenceSpec,
    ParametricModel,
    concurrence_model,
    coordinate,
    discrete_model,
)
from qbound.testing import random_density, random_hermitian


def closed_form_mse(theta):
    return theta ** 2 / 3 - 7 / 12 + (1 / (2 * theta) if theta % 2 else 0.0)


def test_pvm_identity():
    pvm = observable_to_pvm(np.eye(3))
    assert len(pvm) == 1
    assert pvm.values[0] == 1.0 and np.allclose(pvm.elements[0], np.eye(3))


def test_pvm_diagonal():
    pvm = observable_to_pvm(np.diag([2.0, 1.0]))
    assert np.allclose(pvm.values, [1.0, 2.0])
    assert np.allclose(pvm.elements[0], np.diag([0.0, 1.0]))


def test_pvm_discrete_block():
    T1 = np.array([[1.0, 0.5], [0.5, 2.5]])
    pvm = observable_to_pvm(T1)
    assert np.allclose(pvm.values, np.linalg.eigvalsh(T1))
    for P in pvm.elements:
        assert np.allclose(P @ P, P)


def test_pvm_groups_near_degenerate(rng):
    U = np.linalg.qr(rng.normal(size=(4, 4)))[0]
    w = np.array([1.0, 1.0 + 1e-12, 3.0, 3.0])
    T = U @ np.diag(w) @ U.T
    pvm = observable_to_pvm(T)
    assert len(pvm) == 2
    recon = sum(v * P for v, P in zip(pvm.values, pvm.elements))
    assert np.max(np.abs(recon - T)) < 1e-8 * 4 * np.linalg.norm(T, 2)
    assert np.allclose(sum(pvm.elements), np.eye(4))


def test_pvm_reconstructs_random(rng):
    for _ in range(20):
        T = random_hermitian(rng, 5)
        pvm = Observable(T).to_pvm()
        assert np.allclose(sum(v * P for v, P in zip(pvm.values, pvm.elements)), T, atol=1e-10)


def test_povm_validation():
    with pytest.raises(InvalidInputError):
        Povm([0.0, 1.0], [np.diag([1.0, 0.0]), np.diag([0.0, 0.5])])
    with pytest.raises(InvalidInputError):
        Povm([0.0, 1.0], [np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])])
    with pytest.raises(InvalidInputError):
        Povm([0.0], [np.eye(2), np.eye(2)])


def test_discrete_observable_blocks():
    T = discrete_optimal_observable(4).T
    want = np.zeros((4, 4))
    want[:2, :2] = [[1, 0.5], [0.5, 2.5]]
    want[2:, 2:] = [[5, 0.5], [0.5, 6.5]]
    assert np.array_equal(T, want)


def test_discrete_unbiased_all_points():
    dim_cut = 12
    model = discrete_model(dim_cut)
    T = discrete_optimal_observable(dim_cut).T
    for theta in range(1, dim_cut - 1):
        assert np.trace(model.state(theta) @ T).real == pytest.approx(theta, abs=1e-12)


@pytest.mark.parametrize("theta", range(2, 11))
def test_discrete_exact_mse(theta):
    dim_cut = 14
    model = discrete_model(dim_cut)
    rep = exact_bias_mse(model, theta, coordinate(), discrete_optimal_observable(dim_cut).to_pvm())
    assert abs(rep.bias) < 1e-10
    assert rep.mse == pytest.approx(closed_form_mse(theta), abs=1e-9)
    assert rep.mode == "exact"
    rho = model.state(theta)
    T = discrete_optimal_observable(dim_cut).T
    second = np.trace(rho @ T @ T).real - 2 * theta * np.trace(rho @ T).real + theta ** 2
    assert rep.mse == pytest.approx(second, abs=1e-9)


@pytest.mark.parametrize("theta", [3, 5, 7, 9])
def test_discrete_alternative(theta):
    dim_cut = 14
    model = discrete_model(dim_cut)
    alt = discrete_alternative_observable(theta, dim_cut)
    rep = exact_bias_mse(model, theta, coordinate(), alt.to_pvm())
    assert rep.mse == pytest.approx(theta ** 2 / 3 - 7 / 12 + 1 / (4 * theta), abs=1e-9)
    for other in range(1, dim_cut - 1):
        assert np.trace(model.state(other) @ alt.T).real == pytest.approx(other, abs=1e-12)
    with pytest.raises(InvalidInputError):
        discrete_alternative_observable(4, dim_cut)


@pytest.mark.parametrize("theta", [2, 4, 6])
def test_discrete_estimator_attains_koike(theta):
    model = discrete_model(10)
    mse = exact_bias_mse(model, theta, coordinate(), discrete_optimal_observable(10).to_pvm()).mse
    bound = qk_bound(model, theta, coordinate(), -1.0, theta - 1).value
    assert mse == pytest.approx(bound, abs=1e-9)


@pytest.mark.parametrize("theta", [3, 5])
def test_discrete_estimator_above_koike_odd(theta):
    model = discrete_model(10)
    mse = exact_bias_mse(model, theta, coordinate(), discrete_optimal_observable(10).to_pvm()).mse
    assert mse >= qk_bound(model, theta, coordinate(), -1.0, theta - 1).value - 1e-9


@pytest.mark.parametrize("theta", [-0.6, 0.0, 0.3])
def test_concurrence_observable_exact(theta):
    model = concurrence_model()
    pvm = Observable(np.diag([1.0, -1.0])).to_pvm()
    rep = exact_bias_mse(model, theta, coordinate(), pvm)
    assert rep.bias == pytest.approx(0.0, abs=1e-15)
    assert rep.mse == pytest.approx(1 - theta ** 2)
    assert rep.mse >= qhcrk_bound(model, theta, coordinate(), DifferenceSpec(0.1, 1.0)).value - 1e-12


def test_concurrence_observable_attains_bound_at_zero():
    model = concurrence_model()
    pvm = Observable(np.diag([1.0, -1.0])).to_pvm()
    mse = exact_bias_mse(model, 0.0, coordinate(), pvm).mse
    assert mse == pytest.approx(qhcrk_bound(model, 0.0, coordinate(), DifferenceSpec(0.5, 1.0)).value)


def test_trivial_povm():
    model = concurrence_model()
    pvm = Povm([0.7], [np.eye(2)])
    rep = exact_bias_mse(model, 0.2, coordinate(), pvm)
    assert rep.bias == pytest.approx(0.5) and rep.mse == pytest.approx(0.25)
    mc = simulate_povm_sampling(model, 0.2, pvm, 5, 50, seed=1)
    assert mc.mse == pytest.approx(0.25) and mc.std_error < 1e-15


def test_inconsistent_povm():
    rho = np.diag([0.5, 0.5, 0.0])
    model = ParametricModel(lambda th: rho * (1 + 1e-6), dim=3, validate=False)
    with pytest.raises(InconsistentPovmError):
        exact_bias_mse(model, 0.0, coordinate(), Povm([1.0], [np.eye(3)]))


@pytest.mark.parametrize("theta", [0.0, 0.6])
def test_two_step_estimator_mse(theta):
    rep = simulate_concurrence_estimator(theta, 10 ** 4, 10 ** 4, seed=99)
    n = rep.n_copies
    assert abs(n * rep.mse - (1 - theta ** 2)) <= 3 * n * rep.std_error
    assert rep.mse >= rep.bias ** 2 - 1e-9


def test_two_step_estimator_folds_negative():
    rep = simulate_concurrence_estimator(-0.5, 400, 2000, seed=5)
    assert abs(rep.bias) < 0.01
    assert 400 * rep.mse == pytest.approx(0.75, rel=0.1)


def test_two_step_determinism():
    a = simulate_concurrence_estimator(0.3, 100, 500, seed=42)
    b = simulate_concurrence_estimator(0.3, 100, 500, seed=42)
    c = simulate_concurrence_estimator(0.3, 100, 500, seed=43)
    assert a.to_json() == b.to_json()
    assert a.mse != c.mse


def test_trial_substreams_independent_of_order():
    first = [trial_rng(7, k).random() for k in range(5)]
    backwards = [trial_rng(7, k).random() for k in reversed(range(5))][::-1]
    assert first == backwards


def test_povm_sampling_matches_exact():
    model = concurrence_model()
    pvm = Observable(np.diag([1.0, -1.0])).to_pvm()
    exact = exact_bias_mse(model, 0.4, coordinate(), pvm)
    mc = simulate_povm_sampling(model, 0.4, pvm, 1, 20000, seed=3)
    assert abs(mc.mse - exact.mse) <= 4 * mc.std_error
    again = simulate_povm_sampling(model, 0.4, pvm, 1, 20000, seed=3)
    assert mc.to_dict() == again.to_dict()


def test_standard_error_scaling():
    small = simulate_concurrence_estimator(0.2, 50, 2000, seed=11)
    large = simulate_concurrence_estimator(0.2, 50, 8000, seed=11)
    assert large.std_error / small.std_error == pytest.approx(0.5, rel=0.15)


def test_report_fields():
    rep = simulate_concurrence_estimator(0.1, 10, 20, seed=1)
    data = json.loads(rep.to_json())
    assert data["mode"] == "monte_carlo" and data["seed"] == 1 and data["trials"] == 20
    row = rep.csv_row()
    assert row[5] == pytest.approx(10 * rep.mse)


def test_simulation_input_errors():
    with pytest.raises(InvalidInputError):
        simulate_concurrence_estimator(1.0, 10, 10)
    with pytest.raises(InvalidInputError):
        simulate_concurrence_estimator(0.0, 0, 10)
    with pytest.raises(InvalidInputError):
        simulate_concurrence_estimator(0.0, 10, 10, seed=-1)
