"""JSON model files and CSV output.

A model file is either a built-in reference::

    {"builtin": "gaussian2", "params": {"sigma2": 1.0, "truncation": 60}}

or an explicit finite family on a grid of scalar parameter values::

    {"dim": 2, "theta_grid": [0.0, 0.5],
     "states": [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]], ...]}

where each matrix entry is a ``[re, im]`` pair.  ``"domain"`` is accepted
as a synonym of ``"theta_grid"``.  Floats are written with ``repr`` so
matrices survive a round trip bit for bit.
"""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import InvalidInputError
from .gaussian import gaussian_model, gaussian_singular_submodel
from .linalg import as_hermitian, clip_density_matrix
from .models import DiscreteDomain, ParametricModel, concurrence_model, discrete_model

__all__ = [
    "BUILTIN_MODELS",
    "build_builtin",
    "decode_matrix",
    "dump_model",
    "encode_matrix",
    "format_number",
    "load_model",
    "model_from_dict",
    "write_csv",
]

REPAIR_TOL = 1e-13

BUILTIN_MODELS = {
    "concurrence": lambda: concurrence_model(),
    "discrete": lambda dim_cut=24: discrete_model(int(dim_cut)),
    "gaussian2": lambda sigma2=1.0, truncation=60: gaussian_model(float(sigma2), int(truncation)),
    "gaussian_singular": lambda sigma2=1.0, truncation=24: gaussian_singular_submodel(
        "scalar", float(sigma2), int(truncation)),
    "gaussian_singular2": lambda sigma2=1.0, truncation=24: gaussian_singular_submodel(
        "vector", float(sigma2), int(truncation)),
}


def build_builtin(name, **params):
    """Instantiate a built-in model by name; unknown names raise InvalidInputError."""
    if name not in BUILTIN_MODELS:
        raise InvalidInputError(
            f"unknown builtin model {name!r}; choose from {', '.join(sorted(BUILTIN_MODELS))}")
    try:
        return BUILTIN_MODELS[name](**params)
    except TypeError as exc:
        raise InvalidInputError(f"bad parameters for builtin {name!r}: {exc}") from None


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_matrix(data, dim=None):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise InvalidInputError("matrix entries must be [re, im] number pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"matrix must be square of [re, im] pairs, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidInputError(f"matrix has dimension {arr.shape[0]}, expected {dim}")
    return arr[..., 0] + 1j * arr[..., 1]


def _repair(rho):
    """Leave valid states untouched; clip tiny negativity otherwise."""
    rho = as_hermitian(rho, name="density matrix")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -REPAIR_TOL or abs(np.trace(rho).real - 1.0) > REPAIR_TOL:
        return clip_density_matrix(rho)
    return rho


def model_from_dict(data):
    """Build a :class:`ParametricModel` from the decoded JSON object."""
    if not isinstance(data, dict):
        raise InvalidInputError("model description must be a JSON object")
    if "builtin" in data:
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise InvalidInputError("'params' must be an object")
        return build_builtin(data["builtin"], **params)
    grid = data.get("theta_grid", data.get("domain"))
    if grid is None or "states" not in data or "dim" not in data:
        raise InvalidInputError("explicit model needs 'dim', 'theta_grid' and 'states'")
    try:
        dim = int(data["dim"])
        grid = [float(x) for x in grid]
    except (TypeError, ValueError):
        raise InvalidInputError("'dim' must be an integer and 'theta_grid' a list of numbers") from None
    if dim < 1 or not grid or len(set(grid)) != len(grid) or not all(map(math.isfinite, grid)):
        raise InvalidInputError("need dim >= 1 and a non-empty grid of distinct finite values")
    if not isinstance(data["states"], list) or len(data["states"]) != len(grid):
        raise InvalidInputError("need exactly one state per grid point")
    states = {}
    for x, s in zip(grid, data["states"]):
        rho = _repair(decode_matrix(s, dim))
        rho.setflags(write=False)
        states[x] = rho
    domain = DiscreteDomain(tuple(grid))

    def state_fn(th):
        key = min(states, key=lambda p: abs(p - th[0]))
        return states[key]

    return ParametricModel(state_fn, dim=dim, m=1, domain=domain,
                           label=str(data.get("label", "file model")))


def load_model(path):
    """Read a model file; malformed content raises InvalidInputError."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read model file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"model file {path} is not valid JSON: {exc.msg}") from None
    return model_from_dict(data)


def dump_model(model, path=None, label=None):
    """Serialize a discrete-domain model; returns the JSON text."""
    if not model.is_discrete:
        raise InvalidInputError("only discrete-domain models can be written out")
    grid = list(model.domain.points)
    data = {
        "dim": model.dim,
        "label": label or model.label,
        "theta_grid": grid,
        "states": [encode_matrix(model.state(x)) for x in grid],
    }
    text = json.dumps(data)
    if path is not None:
        Path(path).write_text(text)
    return text


def format_number(x):
    """17 significant digits for floats; empty cell for None."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def write_csv(columns, rows, path=None, version=None):
    """Write an RFC-4180 table, preceded by a ``# qbound <version>`` comment line.

    Returns the text.  Writing is done once, after all rows are formatted.
    """
    buf = io.StringIO()
    if version is not None:
        buf.write(f"# qbound {version}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise InvalidInputError("row length does not match the header")
        w.writerow([format_number(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
