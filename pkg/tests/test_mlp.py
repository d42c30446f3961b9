import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mlp_reference
from trajbundle.errors import DimensionError, WeightsFileError
from trajbundle.problems.mlp import (
    MlpWeights,
    identity_weights,
    load_weights,
    mlp_forward,
    random_weights,
    save_weights,
)


def test_zero_weights_return_output_bias():
    b = np.array([1.5, -2.0])
    w = MlpWeights((np.zeros((3, 4)), np.zeros((2, 3))), (np.zeros(3), b))
    for z in (np.zeros(4), np.arange(4.0), -np.ones(4)):
        np.testing.assert_array_equal(mlp_forward(w, z), b)


def test_single_relu_unit():
    w = MlpWeights((np.array([[1.0]]), np.array([[1.0]])), (np.zeros(1), np.zeros(1)))
    assert mlp_forward(w, [-1.0])[0] == 0.0
    assert mlp_forward(w, [2.0])[0] == 2.0


def test_identity_network():
    w = identity_weights(4, 1)
    assert (w.n_in, w.n_out, len(w.weights)) == (5, 4, 3)
    z = np.array([1.0, -2.0, 0.0, 3.5, 9.0])
    np.testing.assert_array_equal(mlp_forward(w, z), z[:4])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), depth=st.integers(1, 4))
def test_matches_duplicate_evaluation(seed, depth):
    rng = np.random.default_rng(seed)
    sizes = [5] + [int(s) for s in rng.integers(1, 12, depth - 1)] + [4]
    w = random_weights(sizes, rng)
    z = rng.standard_normal(5)
    np.testing.assert_allclose(mlp_forward(w, z), mlp_reference(w.weights, w.biases, z), rtol=0, atol=1e-12)


def test_input_normalization():
    w0 = random_weights([3, 6, 2], np.random.default_rng(0))
    shift, scale = np.array([1.0, -1.0, 0.5]), np.array([2.0, 0.5, 4.0])
    w = MlpWeights(w0.weights, w0.biases, input_shift=shift, input_scale=scale)
    z = np.array([0.3, 0.2, -1.0])
    np.testing.assert_allclose(mlp_forward(w, z), mlp_forward(w0, (z - shift) / scale), atol=1e-15)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        mlp_forward(identity_weights(2, 1), np.zeros(4))


def test_save_load_roundtrip(tmp_path):
    w = random_weights([5, 8, 8, 4], np.random.default_rng(2))
    w = MlpWeights(w.weights, w.biases, input_shift=np.ones(5), input_scale=np.full(5, 2.0))
    save_weights(w, tmp_path / "w.json")
    back = load_weights(tmp_path / "w.json", n_out=4)
    z = np.random.default_rng(3).standard_normal(5)
    assert mlp_forward(back, z).tobytes() == mlp_forward(w, z).tobytes()
    d = json.loads((tmp_path / "w.json").read_text())
    assert d["n_in"] == 5 and d["n_out"] == 4 and d["activation"] == "relu"


def test_weights_are_immutable():
    w = identity_weights(2, 1)
    with pytest.raises(ValueError):
        w.weights[0][0, 0] = 5.0


def _write(tmp_path, obj):
    p = tmp_path / "bad.json"
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


GOOD = {"weight": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0]}


@pytest.mark.parametrize(
    "obj,match",
    [
        ("{not json", "cannot read"),
        ([1, 2], "JSON object"),
        ({"layers": []}, "non-empty"),
        ({"layers": [{"weight": [[1.0]]}]}, "layer 0"),
        ({"layers": [{"weight": [[1.0, 2.0], [3.0]], "bias": [0, 0]}]}, "layer 0"),
        ({"layers": [GOOD, {"weight": [[1.0, 2.0, 3.0]], "bias": [0.0]}]}, "layer 1: expects 3 inputs"),
        ({"layers": [{"weight": [[1.0, "NaN"]], "bias": [0.0]}]}, "layer 0"),
        ({"layers": [{"weight": [[1.0, float("inf")]], "bias": [0.0]}]}, "non-finite"),
        ({"layers": [{"weight": [[1.0]], "bias": [0.0, 1.0]}]}, "bias shape"),
        ({"layers": [GOOD], "activation": "tanh"}, "activation"),
        ({"layers": [GOOD], "n_in": 3}, "n_in"),
        ({"layers": [GOOD], "input_scale": [1.0, 0.0]}, "zero"),
        ({"layers": [GOOD], "input_shift": [1.0]}, "input_shift"),
    ],
)
def test_malformed_files_rejected(tmp_path, obj, match):
    with pytest.raises(WeightsFileError, match=match):
        load_weights(_write(tmp_path, obj))


def test_output_size_check(tmp_path):
    save_weights(identity_weights(3, 1), tmp_path / "w.json")
    with pytest.raises(WeightsFileError, match="expected 4"):
        load_weights(tmp_path / "w.json", n_out=4)


def test_missing_file(tmp_path):
    with pytest.raises(WeightsFileError):
        load_weights(tmp_path / "nope.json")
