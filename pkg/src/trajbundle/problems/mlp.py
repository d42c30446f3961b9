"""ReLU multilayer perceptron used as a learned dynamics model.

Only inference is supported. Weights are loaded from JSON:

    {"layers": [{"weight": [[...], ...], "bias": [...]}, ...],
     "activation": "relu", "n_in": 5, "n_out": 4,
     "input_shift": [...], "input_scale": [...]}      # last two optional

Inputs are normalized as ``(z - input_shift) / input_scale`` before the
first layer when the optional fields are present. Every layer but the last is
followed by a ReLU.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..errors import DimensionError, WeightsFileError

_ACTIVATIONS = ("relu",)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MlpWeights:
    weights: tuple
    biases: tuple
    activation: str = "relu"
    input_shift: Optional[np.ndarray] = None
    input_scale: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise WeightsFileError(f"unsupported activation {self.activation!r}; expected one of {_ACTIVATIONS}")
        if len(self.weights) == 0 or len(self.weights) != len(self.biases):
            raise WeightsFileError(f"need matching non-empty weight/bias lists, got {len(self.weights)}/{len(self.biases)}")
        Ws = tuple(_frozen(W) for W in self.weights)
        bs = tuple(_frozen(b) for b in self.biases)
        for i, (W, b) in enumerate(zip(Ws, bs)):
            if W.ndim != 2:
                raise WeightsFileError(f"layer {i}: weight must be 2-D, got shape {W.shape}")
            if b.shape != (W.shape[0],):
                raise WeightsFileError(f"layer {i}: bias shape {b.shape} does not match weight rows {W.shape[0]}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise WeightsFileError(f"layer {i}: non-finite entries")
            if i and W.shape[1] != Ws[i - 1].shape[0]:
                raise WeightsFileError(
                    f"layer {i}: expects {W.shape[1]} inputs but layer {i - 1} produces {Ws[i - 1].shape[0]}"
                )
        object.__setattr__(self, "weights", Ws)
        object.__setattr__(self, "biases", bs)
        for name in ("input_shift", "input_scale"):
            v = getattr(self, name)
            if v is None:
                continue
            v = _frozen(v)
            if v.shape != (self.n_in,) or not np.all(np.isfinite(v)):
                raise WeightsFileError(f"{name} must be a finite vector of length {self.n_in}, got shape {v.shape}")
            object.__setattr__(self, name, v)
        if self.input_scale is not None and np.any(self.input_scale == 0):
            raise WeightsFileError("input_scale has zero entries")

    @property
    def n_in(self) -> int:
        return self.weights[0].shape[1]

    @property
    def n_out(self) -> int:
        return self.weights[-1].shape[0]

    def to_dict(self) -> dict:
        d = {
            "layers": [{"weight": W.tolist(), "bias": b.tolist()} for W, b in zip(self.weights, self.biases)],
            "activation": self.activation,
            "n_in": self.n_in,
            "n_out": self.n_out,
        }
        if self.input_shift is not None:
            d["input_shift"] = self.input_shift.tolist()
        if self.input_scale is not None:
            d["input_scale"] = self.input_scale.tolist()
        return d


def mlp_forward(w: MlpWeights, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (w.n_in,):
        raise DimensionError("mlp input", (w.n_in,), z.shape)
    h = z
    if w.input_shift is not None:
        h = h - w.input_shift
    if w.input_scale is not None:
        h = h / w.input_scale
    last = len(w.weights) - 1
    for i, (W, b) in enumerate(zip(w.weights, w.biases)):
        h = W @ h + b
        if i < last:
            h = np.maximum(h, 0.0)
    return h


def weights_from_dict(d: dict) -> MlpWeights:
    if not isinstance(d, dict):
        raise WeightsFileError(f"weights file must hold a JSON object, got {type(d).__name__}")
    layers = d.get("layers")
    if not isinstance(layers, list) or not layers:
        raise WeightsFileError("'layers' must be a non-empty list")
    Ws, bs = [], []
    for i, layer in enumerate(layers):
        if not isinstance(layer, dict) or "weight" not in layer or "bias" not in layer:
            raise WeightsFileError(f"layer {i}: needs 'weight' and 'bias'")
        try:
            Ws.append(np.array(layer["weight"], dtype=float))
            bs.append(np.array(layer["bias"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise WeightsFileError(f"layer {i}: ragged or non-numeric array ({exc})") from exc
    w = MlpWeights(
        tuple(Ws),
        tuple(bs),
        d.get("activation", "relu"),
        d.get("input_shift"),
        d.get("input_scale"),
    )
    for key, got in (("n_in", w.n_in), ("n_out", w.n_out)):
        if key in d and d[key] != got:
            raise WeightsFileError(f"declared {key}={d[key]} but layers give {got}")
    return w


def load_weights(path: str | Path, n_out: int | None = None) -> MlpWeights:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise WeightsFileError(f"cannot read weights file {path}: {exc}") from exc
    w = weights_from_dict(raw)
    if n_out is not None and w.n_out != n_out:
        raise WeightsFileError(f"network outputs {w.n_out} values, expected {n_out}")
    return w


def save_weights(w: MlpWeights, path: str | Path) -> None:
    Path(path).write_text(json.dumps(w.to_dict()))


def identity_weights(n_x: int, n_u: int, hidden_layers: int = 2) -> MlpWeights:
    """Hand-built ReLU network with ``mlp_forward(w, [x, u]) == x``.

    Uses ``x = relu(x) - relu(-x)``: the first layer splits ``x`` into positive
    and negative parts, later hidden layers pass them through, and the output
    layer recombines them.
    """
    if hidden_layers < 1:
        raise ValueError("identity network needs at least one hidden layer")
    I = np.eye(n_x)
    first = np.hstack([np.vstack([I, -I]), np.zeros((2 * n_x, n_u))])
    Ws = [first] + [np.eye(2 * n_x)] * (hidden_layers - 1) + [np.hstack([I, -I])]
    bs = [np.zeros(2 * n_x)] * hidden_layers + [np.zeros(n_x)]
    return MlpWeights(tuple(Ws), tuple(bs))


def random_weights(sizes: Sequence[int], rng: np.random.Generator, scale: float = 0.5) -> MlpWeights:
    """Random network with layer widths ``sizes`` (input first)."""
    Ws = tuple(scale * rng.standard_normal((b, a)) for a, b in zip(sizes[:-1], sizes[1:]))
    bs = tuple(scale * rng.standard_normal(b) for b in sizes[1:])
    return MlpWeights(Ws, bs)
