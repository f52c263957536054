"""The three classifier architectures, parameter accounting, and the summary table.

Kinds:
  big   - ten dense layers narrowing 2500 -> ... -> 1, batch-norm after each of
          the first nine, sigmoid head.
  small - dense (no bias) -> activation -> batch-norm -> dense(10) -> activation
          -> dense(1) -> sigmoid.
  cnn   - three conv/pool blocks widening 1 -> 16 -> 64 -> 128 channels, then
          dense -> leaky-relu -> dense with 2 output logits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, ValidationError
from .layers import (
    Activation,
    BatchNorm1d,
    Conv1d,
    Dense,
    ExpandChannel,
    Flatten,
    Layer,
    MaxPool1d,
    Parameter,
)

MODEL_KINDS = ("big", "small", "cnn")

BIG_WIDTHS = (2500, 1000, 500, 200, 100, 50, 25, 15, 10, 1)


@dataclass
class ModelOptions:
    """Knobs the architecture tables leave open."""

    seed: int = 0
    hidden_activation: str = "relu"
    leaky_slope: float = 0.01
    small_hidden: int = 64   # width of the small model's first dense layer
    cnn_hidden: int = 64     # width of the cnn's first dense layer
    bn_epsilon: float = 1e-5
    bn_momentum: float = 0.1


@dataclass(frozen=True)
class ParamCount:
    total: int
    trainable: int
    non_trainable: int


class Model:
    """An ordered layer stack with a single forward/backward path."""

    def __init__(self, layers: list[Layer], kind: str, input_dim: int):
        self.layers = layers
        self.kind = kind
        self.input_dim = input_dim

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return x

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad_out = layer.backward(grad_out)
        return grad_out

    def params(self) -> list[Parameter]:
        return [p for layer in self.layers for p in layer.params()]

    def trainable_params(self) -> list[Parameter]:
        return [p for p in self.params() if p.trainable]

    def predict_scores(self, x: np.ndarray) -> np.ndarray:
        """Inference-mode class-1 score in [0, 1] per example."""
        out = self.forward(np.asarray(x, dtype=np.float64), training=False)
        if out.ndim == 2 and out.shape[1] == 2:
            shifted = out - out.max(axis=1, keepdims=True)
            probs = np.exp(shifted)
            probs /= probs.sum(axis=1, keepdims=True)
            return probs[:, 1]
        return out.reshape(-1)

    def get_state(self) -> list[np.ndarray]:
        return [p.value.copy() for p in self.params()]

    def set_state(self, state: list[np.ndarray]) -> None:
        params = self.params()
        if len(state) != len(params):
            raise DimensionError("state length does not match parameter count")
        for p, value in zip(params, state):
            if p.value.shape != value.shape:
                raise DimensionError(f"state shape mismatch for {p.name}")
            p.value = value.copy()

    def layer_shapes(self) -> list[tuple]:
        """Output shape (without batch dim) after each layer."""
        shape: tuple = (self.input_dim,)
        shapes = []
        for layer in self.layers:
            shape = layer.output_shape(shape)
            shapes.append(shape)
        return shapes


def build_model(kind: str, input_dim: int, options: ModelOptions | None = None) -> Model:
    """Construct one of the three architectures for the given feature count."""
    kind = str(kind).lower()
    if kind not in MODEL_KINDS:
        raise ValidationError(f"unknown model kind {kind!r}; choose from {MODEL_KINDS}")
    if input_dim < 1:
        raise ValidationError("input_dim must be >= 1")
    opts = options or ModelOptions()
    rng = np.random.default_rng(opts.seed)
    act = opts.hidden_activation
    layers: list[Layer] = []

    if kind == "big":
        in_dim = input_dim
        for width in BIG_WIDTHS[:-1]:
            layers.append(Dense(in_dim, width, rng=rng))
            layers.append(BatchNorm1d(width, epsilon=opts.bn_epsilon, momentum=opts.bn_momentum))
            layers.append(Activation(act, slope=opts.leaky_slope))
            in_dim = width
        layers.append(Dense(in_dim, 1, rng=rng))
        layers.append(Activation("sigmoid"))
    elif kind == "small":
        h = opts.small_hidden
        layers.append(Dense(input_dim, h, use_bias=False, rng=rng))
        layers.append(Activation(act, slope=opts.leaky_slope))
        layers.append(BatchNorm1d(h, epsilon=opts.bn_epsilon, momentum=opts.bn_momentum))
        layers.append(Dense(h, 10, rng=rng))
        layers.append(Activation(act, slope=opts.leaky_slope))
        layers.append(Dense(10, 1, rng=rng))
        layers.append(Activation("sigmoid"))
    else:  # cnn
        layers.append(ExpandChannel())
        length = input_dim
        in_ch = 1
        for out_ch in (16, 64, 128):
            conv = Conv1d(in_ch, out_ch, kernel_size=3, stride=1, padding=1, rng=rng)
            pool = MaxPool1d(kernel_size=2, stride=2)
            length = pool.out_length(conv.out_length(length))
            layers.append(conv)
            layers.append(pool)
            in_ch = out_ch
        layers.append(Flatten())
        layers.append(Dense(128 * length, opts.cnn_hidden, rng=rng))
        layers.append(Activation("leaky_relu", slope=opts.leaky_slope))
        layers.append(Dense(opts.cnn_hidden, 2, rng=rng))

    return Model(layers, kind, input_dim)


def count_parameters(model: Model) -> ParamCount:
    """Exact parameter totals; batch-norm contributes 2d trainable + 2d non-trainable."""
    trainable = sum(p.size for p in model.params() if p.trainable)
    non_trainable = sum(p.size for p in model.params() if not p.trainable)
    return ParamCount(trainable + non_trainable, trainable, non_trainable)


def layer_param_counts(model: Model) -> list[int]:
    """Per-layer total parameter counts for layers that carry parameters."""
    return [sum(p.size for p in layer.params()) for layer in model.layers if layer.params()]


def summary(model: Model) -> str:
    """Architecture table: layer, output shape, parameter count, plus totals."""
    rows = [("Layer (type)", "Output Shape", "Param")]
    shapes = model.layer_shapes()
    counters: dict[str, int] = {}
    for layer, shape in zip(model.layers, shapes):
        idx = counters.get(layer.name, 0)
        counters[layer.name] = idx + 1
        label = layer.name if idx == 0 else f"{layer.name}_{idx}"
        n_params = sum(p.size for p in layer.params())
        shape_str = "(" + ", ".join(str(s) for s in shape) + ")"
        rows.append((label, shape_str, str(n_params)))
    counts = count_parameters(model)
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
             for row in rows]
    lines.insert(1, "-" * (sum(widths) + 4))
    lines.append("-" * (sum(widths) + 4))
    lines.append(f"Total parameters : {counts.total}")
    lines.append(f"Trainable parameters : {counts.trainable}")
    lines.append(f"Non-trainable parameters : {counts.non_trainable}")
    return "\n".join(lines)
