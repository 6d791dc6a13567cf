"""Estimators: measurements, exact bias and MSE, Monte Carlo simulation.

Monte Carlo runs draw every trial from its own substream, derived from
``(seed, trial index)`` with :class:`numpy.random.SeedSequence`, so results do
not depend on how trials are scheduled.
"""

import json
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import InconsistentPovmError, InvalidInputError
from .linalg import as_hermitian, eig_hermitian

__all__ = [
    "ESTIMATOR_CSV_COLUMNS",
    "EstimatorReport",
    "Observable",
    "Povm",
    "discrete_alternative_observable",
    "discrete_optimal_observable",
    "exact_bias_mse",
    "observable_to_pvm",
    "simulate_concurrence_estimator",
    "simulate_povm_sampling",
    "trial_rng",
]

POVM_TOL = 1e-9
PSD_TOL = 1e-10
PROB_TOL = 1e-8

ESTIMATOR_CSV_COLUMNS = ("theta", "n", "trials", "bias", "mse", "n_times_mse",
                         "std_error", "seed")


class Povm:
    """A measurement with real outcome values.

    Parameters
    ----------
    values : sequence of float
        Estimate reported for each outcome.
    elements : sequence of ndarray
        Positive semidefinite operators summing to the identity.
    """

    def __init__(self, values: Sequence[float], elements: Sequence[np.ndarray], tol=POVM_TOL):
        if len(values) != len(elements) or not len(values):
            raise InvalidInputError("need one element per outcome value, and at least one outcome")
        self.values = np.asarray(values, dtype=float)
        self.elements = [as_hermitian(E, name="POVM element") for E in elements]
        dim = self.elements[0].shape[0]
        if any(E.shape != (dim, dim) for E in self.elements):
            raise InvalidInputError("POVM elements have mismatched shapes")
        for E in self.elements:
            if np.linalg.eigvalsh(E)[0] < -PSD_TOL:
                raise InvalidInputError("POVM element is not positive semidefinite")
        total = sum(self.elements)
        if np.max(np.abs(total - np.eye(dim))) > tol:
            raise InvalidInputError("POVM elements do not sum to the identity")
        self.dim = dim

    def __len__(self):
        return len(self.values)

    def probabilities(self, rho):
        rho = np.asarray(rho)
        return np.array([np.real(np.sum(rho * E.T)) for E in self.elements])


@dataclass(frozen=True)
class Observable:
    """Hermitian ``T`` to be measured through its spectral decomposition."""

    T: np.ndarray
    grouping_tol: Optional[float] = None

    def to_pvm(self):
        return observable_to_pvm(self.T, self.grouping_tol)


def observable_to_pvm(T, grouping_tol=None):
    """Spectral measurement of ``T``.

    Eigenvalues closer than ``grouping_tol`` (default ``1e-8 * ||T||``) to
    their neighbour are merged; the merged outcome has the group's mean
    eigenvalue and the sum of the projectors.
    """
    if isinstance(T, Observable):
        T, grouping_tol = T.T, T.grouping_tol if grouping_tol is None else grouping_tol
    T = as_hermitian(T, name="observable")
    if grouping_tol is None:
        grouping_tol = 1e-8 * max(np.linalg.norm(T, 2), 1e-300)
    w, U = eig_hermitian(T)
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= grouping_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    values, elements = [], []
    for idx in groups:
        V = U[:, idx]
        values.append(float(np.mean(w[idx])))
        elements.append(V @ V.conj().T)
    return Povm(values, elements)


@dataclass
class EstimatorReport:
    bias: float
    mse: float
    mode: str
    n_copies: int = 1
    trials: Optional[int] = None
    seed: Optional[int] = None
    std_error: Optional[float] = None
    theta: Optional[float] = None

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def csv_row(self):
        """Values for :data:`ESTIMATOR_CSV_COLUMNS`."""
        return (self.theta, self.n_copies, self.trials, self.bias, self.mse,
                self.n_copies * self.mse, self.std_error, self.seed)


def _target(g, theta):
    return float(g(np.atleast_1d(np.asarray(theta, dtype=float))))


def exact_bias_mse(model, theta, g, M):
    """Bias and MSE of the single-copy estimator given by ``M``.

    ``bias = sum (gamma - g) p_gamma`` and ``mse = sum (gamma - g)^2 p_gamma``
    with Born probabilities ``p_gamma = Tr rho_theta M_gamma``.
    """
    rho = model.state(theta)
    if M.dim != rho.shape[0]:
        raise InvalidInputError(f"POVM acts on dimension {M.dim}, state on {rho.shape[0]}")
    p = M.probabilities(rho)
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise InconsistentPovmError(f"outcome probabilities sum to {p.sum()!r}")
    err = M.values - _target(g, theta)
    return EstimatorReport(float(err @ p), float(err ** 2 @ p), "exact",
                           theta=_scalar_theta(theta))


def _scalar_theta(theta):
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    return float(arr[0]) if arr.size == 1 else None


def _discrete_blocks(dim_cut):
    if dim_cut < 4 or dim_cut % 2:
        raise InvalidInputError("dim_cut must be even and at least 4")
    return [np.array([[2 * i - 1, 0.5], [0.5, 2 * i + 0.5]]) for i in range(1, dim_cut, 2)]


def _block_diag(blocks):
    n = sum(b.shape[0] for b in blocks)
    T = np.zeros((n, n))
    k = 0
    for b in blocks:
        T[k:k + 2, k:k + 2] = b
        k += 2
    return T


def discrete_optimal_observable(dim_cut):
    """Unbiased minimum-variance observable for the discrete family.

    Block diagonal with ``[[2i - 1, 1/2], [1/2, 2i + 1/2]]`` for odd
    ``i = 1, 3, ...``, one block per two dimensions of ``dim_cut``.
    """
    return Observable(_block_diag(_discrete_blocks(dim_cut)))


def discrete_alternative_observable(theta, dim_cut):
    """Variant for odd ``theta`` with the block holding ``theta`` set to ``diag(2 theta - 1, 2 theta + 1)``.

    It stays unbiased and beats :func:`discrete_optimal_observable` at that
    ``theta``.
    """
    if int(theta) != theta or theta < 1 or theta % 2 == 0:
        raise InvalidInputError("the alternative observable is defined for odd theta")
    blocks = _discrete_blocks(dim_cut)
    b = (int(theta) - 1) // 2
    if b >= len(blocks):
        raise InvalidInputError(f"dim_cut={dim_cut} too small for theta={theta}")
    blocks[b] = np.diag([2.0 * theta - 1, 2.0 * theta + 1])
    return Observable(_block_diag(blocks))


def trial_rng(seed, trial):
    """Generator for one Monte Carlo trial, independent of scheduling."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))))


def _check_sizes(n, trials, seed):
    if int(n) != n or n < 1:
        raise InvalidInputError("number of copies must be a positive integer")
    if int(trials) != trials or trials < 1:
        raise InvalidInputError("trials must be a positive integer")
    if not 0 <= int(seed) < 2 ** 64:
        raise InvalidInputError("seed must be a 64-bit unsigned integer")


def _mc_report(errors, n, trials, seed, theta):
    sq = errors ** 2
    se = float(np.std(sq, ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return EstimatorReport(float(np.mean(errors)), float(np.mean(sq)), "monte_carlo",
                           n_copies=int(n), trials=int(trials), seed=int(seed),
                           std_error=se, theta=theta)


def simulate_concurrence_estimator(theta, n, trials, seed=0):
    """Monte Carlo bias and MSE of the folded sample-mean estimator of ``|theta|``.

    Each copy gives ``+1`` (probability ``(1 + theta)/2``) or ``-1``.  With
    sample mean ``m`` the estimate is ``-m`` if ``m < -n^(-1/3)`` and ``m``
    otherwise.  ``std_error`` is the standard error of the MSE.
    """
    if not -1.0 < theta < 1.0:
        raise InvalidInputError("theta must lie in (-1, 1)")
    _check_sizes(n, trials, seed)
    p = (1.0 + theta) / 2.0
    threshold = -float(n) ** (-1.0 / 3.0)
    plus = np.array([trial_rng(seed, k).binomial(n, p) for k in range(trials)])
    mean = (2.0 * plus - n) / n
    est = np.where(mean < threshold, -mean, mean)
    return _mc_report(est - abs(theta), n, trials, seed, float(theta))


def simulate_povm_sampling(model, theta, M, n_copies, trials, seed=0, g=None):
    """Monte Carlo of measuring ``M`` on each of ``n_copies`` and averaging the values.

    ``g`` defaults to the first coordinate of ``theta``.
    """
    _check_sizes(n_copies, trials, seed)
    rho = model.state(theta)
    p = M.probabilities(rho)
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise InconsistentPovmError(f"outcome probabilities sum to {p.sum()!r}")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    target = _target(g, theta) if g is not None else float(np.atleast_1d(theta)[0])
    est = np.empty(trials)
    for k in range(trials):
        counts = trial_rng(seed, k).multinomial(n_copies, p)
        est[k] = counts @ M.values / n_copies
    return _mc_report(est - target, n_copies, trials, seed, _scalar_theta(theta))
