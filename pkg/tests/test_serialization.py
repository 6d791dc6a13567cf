import json

import numpy as np
import pytest

from qbound.exceptions import InvalidInputError
from qbound.models import discrete_model
from qbound.serialization import (
    build_builtin,
    decode_matrix,
    dump_model,
    encode_matrix,
    format_number,
    load_model,
    model_from_dict,
    write_csv,
)
from qbound.testing import random_density, two_point_model


def test_matrix_round_trip_bit_exact(rng):
    M = random_density(rng, 5) * np.pi
    text = json.dumps(encode_matrix(M))
    back = decode_matrix(json.loads(text))
    assert np.array_equal(back, M)


def test_model_round_trip(tmp_path, rng):
    model = discrete_model(8)
    path = tmp_path / "m.json"
    dump_model(model, path)
    loaded = load_model(path)
    assert loaded.domain.points == model.domain.points
    for x in model.domain.points:
        assert np.array_equal(loaded.state(x), model.state(x))
    pair = two_point_model(random_density(rng, 3), random_density(rng, 3), 0.0, 0.25)
    loaded = model_from_dict(json.loads(dump_model(pair)))
    assert np.array_equal(loaded.state(0.25), pair.state(0.25))


def test_clipping_on_load():
    rho = np.diag([1.0 + 4e-11, -4e-11])
    data = {"dim": 2, "theta_grid": [0.0], "states": [encode_matrix(rho)]}
    loaded = model_from_dict(data)
    assert np.allclose(loaded.state(0.0), np.diag([1.0, 0.0]), atol=1e-15)
    data["states"] = [encode_matrix(np.diag([1.1, -0.1]))]
    with pytest.raises(InvalidInputError):
        model_from_dict(data)


@pytest.mark.parametrize("data", [
    [],
    {"dim": 2},
    {"dim": 2, "theta_grid": [0, 1], "states": [[[[1, 0]]]]},
    {"dim": 2, "theta_grid": [0], "states": [[[1, 0], [0, 0]]]},
    {"dim": 2, "theta_grid": [0, 0], "states": [[], []]},
    {"builtin": "nope"},
    {"builtin": "concurrence", "params": {"sigma2": 1}},
])
def test_malformed_models(data):
    with pytest.raises(InvalidInputError):
        model_from_dict(data)


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidInputError):
        load_model(bad)
    with pytest.raises(InvalidInputError):
        load_model(tmp_path / "missing.json")


def test_builtins():
    assert build_builtin("gaussian2", sigma2=1.0, truncation=20).m == 2
    assert build_builtin("discrete", dim_cut=6).dim == 6
    assert model_from_dict({"builtin": "concurrence"}).label == "concurrence"


def test_number_format():
    assert format_number(0.1) == "0.10000000000000001"
    assert float(format_number(np.pi)) == np.pi
    assert format_number(None) == ""
    assert format_number(True) == "true"
    assert format_number(3) == "3"


def test_csv_layout(tmp_path):
    path = tmp_path / "t.csv"
    text = write_csv(["a", "b"], [[1, 0.5], [2, None]], path, version="9.9")
    assert text.splitlines()[0] == "# qbound 9.9"
    assert text.splitlines()[1] == "a,b"
    assert "\r\n" in text
    assert path.read_bytes() == text.encode()
    with pytest.raises(InvalidInputError):
        write_csv(["a"], [[1, 2]])
