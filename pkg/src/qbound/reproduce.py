"""Data tables behind the worked-example figures.

Each table is a function returning ``(columns, rows)``.  Grid points are
evaluated on a thread pool whose size is capped by the ``QBOUND_THREADS``
environment variable; rows come back in grid order regardless.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bounds import discrete_asymptotic_exponent, relative_entropy
from .estimators import discrete_optimal_observable, exact_bias_mse
from .exceptions import InvalidInputError
from .gaussian_bounds import (
    gaussian_2d_finite_delta_bound,
    gaussian_case2_bounds,
    gaussian_koike_bound,
    gaussian_koike_bound_numeric,
)
from .models import coordinate, discrete_model

__all__ = ["FIGURES", "column", "discrete_closed_form_mse", "fig1", "fig2", "fig3",
           "reproduce", "table_discrete", "thread_count"]

FIG2_SIGMA2 = (0.5, 1.0, 2.0, 5.0, 50.0)


def thread_count():
    """Worker threads: ``QBOUND_THREADS`` if set, else up to 4."""
    raw = os.environ.get("QBOUND_THREADS")
    if raw is None:
        return max(1, min(4, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInputError(f"QBOUND_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise InvalidInputError("QBOUND_THREADS must be at least 1")
    return n


def _map(fn, items):
    items = list(items)
    n = min(thread_count(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _grid(start, stop, step, include_stop=True):
    """Grid ``start, start+step, ...`` built from integer multiples to avoid drift."""
    count = int(math.floor((stop - start) / step + 1e-9))
    pts = [round(start + i * step, 12) for i in range(count + 1)]
    if not include_stop and pts and abs(pts[-1] - stop) < 1e-12:
        pts.pop()
    return pts


def fig1(sigma2=1.0, theta=1.0, step=0.05, stop=3.0, include_sld=True, truncation=30):
    """Koike-type bound against the jump ``delta1`` for the kinked scalar submodel.

    ``bound`` is the closed form.  ``sld_koike`` is the same two-step bound
    with symmetric log derivatives, from truncated Fock states.
    """
    deltas = _grid(step, stop, step)
    columns = ["delta1", "bound"] + (["sld_koike"] if include_sld else [])

    def row(d):
        out = [d, gaussian_koike_bound(theta, d, sigma2)]
        if include_sld:
            out.append(gaussian_koike_bound_numeric(theta, d, sigma2, "sld", truncation))
        return out

    return columns, _map(row, deltas)


def fig2(step=0.02, sigma2_values=FIG2_SIGMA2):
    """RLD and SLD bounds on the edge ``theta2 = 0`` against the split weight ``t2``."""
    rows = []
    for s2 in sigma2_values:
        for t2 in _grid(0.0, 1.0, step):
            rld, sld = gaussian_case2_bounds(t2, s2)
            rows.append([t2, s2, rld, sld])
    return ["t2", "sigma2", "rld_bound", "sld_bound"], rows


def fig3(sigma2=1.0, step=0.05, start=-2.0):
    """Finite-step RLD bound in the negative quadrant against the two limiting bounds.

    Each coordinate is differenced from ``theta^i`` to ``-theta^i`` (step
    ``-2 theta^i``).  ``bound_b = 2 sigma2 + 1`` is the derivative RLD bound
    away from the kink and ``bound_c = 4 sigma2 + 2`` the limiting bound at it.
    """
    axis = _grid(start, 0.0, step, include_stop=False)
    pairs = [(a, b) for a in axis for b in axis]

    def row(p):
        a, b = p
        return [a, b, gaussian_2d_finite_delta_bound(a, b, -a, -b, sigma2),
                2 * sigma2 + 1, 4 * sigma2 + 2]

    return ["theta1", "theta2", "bound_a", "bound_b", "bound_c"], _map(row, pairs)


def discrete_closed_form_mse(theta):
    """MSE of the block observable estimator on the discrete family."""
    return theta ** 2 / 3 - 7 / 12 + (1 / (2 * theta) if theta % 2 else 0.0)


def table_discrete(theta_max=10, dim_cut=None):
    """Exponents, relative entropies and estimator MSEs for ``theta = 2..theta_max``."""
    if theta_max < 2:
        raise InvalidInputError("theta_max must be at least 2")
    dim_cut = dim_cut or 2 * (theta_max // 2) + 4
    model = discrete_model(dim_cut)
    pvm = discrete_optimal_observable(dim_cut).to_pvm()
    rows = []
    for th in range(2, theta_max + 1):
        rows.append([
            th,
            discrete_asymptotic_exponent(model, th, -1),
            relative_entropy(model.state(th - 1), model.state(th)),
            discrete_closed_form_mse(th),
            exact_bias_mse(model, th, coordinate(), pvm).mse,
        ])
    return ["theta", "exponent", "relative_entropy", "closed_form_mse", "exact_mse"], rows


FIGURES = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "table_discrete": table_discrete}


def reproduce(figure_id, **kw):
    if figure_id not in FIGURES:
        raise InvalidInputError(
            f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}")
    return FIGURES[figure_id](**kw)


def column(table, name):
    """Extract one column of a ``(columns, rows)`` table as an array."""
    columns, rows = table
    i = columns.index(name)
    return np.array([r[i] for r in rows], dtype=float)
