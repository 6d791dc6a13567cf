"""Random states and models for property checks.

All generators take a :class:`numpy.random.Generator` so suites are
reproducible from one seed.
"""

import numpy as np
from scipy.linalg import expm

from .models import DiscreteDomain, Interval, ParametricModel

__all__ = [
    "kinked_model",
    "random_density",
    "random_hermitian",
    "random_traceless",
    "smooth_model",
    "two_point_model",
]


def random_hermitian(rng, dim, scale=1.0):
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (X + X.conj().T) / 2


def random_traceless(rng, dim, scale=1.0):
    H = random_hermitian(rng, dim, scale)
    return H - np.trace(H).real / dim * np.eye(dim)


def random_density(rng, dim, rank=None, min_eig=0.0):
    """Random state; ``min_eig`` mixes in white noise to bound the spectrum below."""
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    rho /= np.trace(rho).real
    if min_eig > 0:
        rho = (1 - dim * min_eig) * rho + min_eig * np.eye(dim)
    return 0.5 * (rho + rho.conj().T)


def smooth_model(rng, dim, min_eig=0.02):
    """Differentiable full-rank model on the real line.

    ``rho(x) = U(x) ((1 - s) A + s B) U(x)^dagger`` with ``s = (1 + tanh x)/2``
    and ``U(x) = exp(-i x H)``.
    """
    A = random_density(rng, dim, min_eig=min_eig)
    B = random_density(rng, dim, min_eig=min_eig)
    H = random_hermitian(rng, dim, 0.5)

    def state(th):
        s = (1 + np.tanh(th[0])) / 2
        U = expm(-1j * th[0] * H)
        return U @ ((1 - s) * A + s * B) @ U.conj().T

    return ParametricModel(state, dim=dim, label=f"smooth(dim={dim})", validate=False)


def kinked_model(rng, dim, radius=0.5):
    """Full-rank model that is quadratic on each side of ``x = 0``.

    Returns the model with the exact one-sided derivatives at zero:
    ``(model, right_derivative, left_derivative)``.  The domain is
    ``(-radius, radius)`` and every state there is positive definite.
    """
    rho0 = random_density(rng, dim, min_eig=0.5 / dim)
    floor = np.linalg.eigvalsh(rho0)[0]
    terms = []
    for _ in range(4):
        X = random_traceless(rng, dim)
        terms.append(X / np.linalg.norm(X, 2))
    # each piece moves the spectrum by at most floor/2 on the domain
    c = floor / (2 * (radius + radius ** 2))
    Dp, Dm, Cp, Cm = (c * X for X in terms)

    def state(th):
        x = th[0]
        return rho0 + (x * Dp + x * x * Cp if x >= 0 else x * Dm + x * x * Cm)

    model = ParametricModel(state, dim=dim, domain=(Interval(-radius, radius),),
                            label=f"kinked(dim={dim})", validate=False)
    return model, Dp, Dm


def two_point_model(rho, sigma, theta=0.0, delta=1.0):
    """Discrete model with ``rho`` at ``theta`` and ``sigma`` at ``theta + delta``."""
    states = {theta: np.asarray(rho), theta + delta: np.asarray(sigma)}

    def state(th):
        return states[min(states, key=lambda p: abs(p - th[0]))]

    return ParametricModel(state, dim=len(rho), domain=DiscreteDomain(tuple(states)),
                           label="two_point", validate=False)
