"""Layers with explicit forward/backward passes on 64-bit numpy arrays.

Dense and batch-norm layers operate on (batch, features) matrices; the 1-D
convolution and pooling layers operate on (batch, channels, length) arrays.
Every layer caches what its backward pass needs during forward; calling
backward without a matching training-mode forward raises StateError.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateBatchError, DimensionError, StateError, ValidationError

ACTIVATION_KINDS = ("relu", "leaky_relu", "sigmoid", "tanh")


class Parameter:
    """A named trainable (or running-statistic) array with a gradient slot."""

    def __init__(self, name: str, value: np.ndarray, trainable: bool = True):
        self.name = name
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.trainable = trainable

    @property
    def size(self) -> int:
        return self.value.size

    def __repr__(self):
        return f"Parameter({self.name}, shape={self.value.shape}, trainable={self.trainable})"


class Layer:
    """Base layer: forward/backward plus parameter enumeration."""

    name = "layer"

    def forward(self, x: np.ndarray, training: bool = True) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> list[Parameter]:
        return []

    def output_shape(self, in_shape: tuple) -> tuple:
        """Shape of the output (without batch dim) for a given input shape."""
        return in_shape


def _as_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"expected a (batch, features) matrix, got shape {x.shape}")
    return x


class Dense(Layer):
    """Affine map: out = x @ W.T + b with W of shape (out_features, in_features)."""

    name = "dense"

    def __init__(self, in_features: int, out_features: int, use_bias: bool = True,
                 rng: np.random.Generator | None = None):
        if in_features < 1 or out_features < 1:
            raise ValidationError("dense layer dimensions must be >= 1")
        self.in_features = in_features
        self.out_features = out_features
        self.use_bias = use_bias
        rng = rng or np.random.default_rng(0)
        limit = np.sqrt(6.0 / (in_features + out_features))
        self.weight = Parameter("weight", rng.uniform(-limit, limit, (out_features, in_features)))
        self.bias = Parameter("bias", np.zeros(out_features)) if use_bias else None
        self._cache = None

    def params(self):
        return [self.weight] + ([self.bias] if self.bias is not None else [])

    def output_shape(self, in_shape):
        return (self.out_features,)

    def forward(self, x, training=True):
        x = _as_matrix(x)
        if x.shape[1] != self.in_features:
            raise DimensionError(
                f"dense expects {self.in_features} input features, got {x.shape[1]}")
        self._cache = x if training else None
        out = x @ self.weight.value.T
        if self.bias is not None:
            out = out + self.bias.value
        return out

    def backward(self, grad_out):
        if self._cache is None:
            raise StateError("dense backward called without a training-mode forward")
        grad_out = _as_matrix(grad_out)
        if grad_out.shape[1] != self.out_features:
            raise DimensionError(
                f"upstream gradient has {grad_out.shape[1]} columns, expected {self.out_features}")
        x = self._cache
        self.weight.grad = grad_out.T @ x
        if self.bias is not None:
            self.bias.grad = grad_out.sum(axis=0)
        return grad_out @ self.weight.value


class BatchNorm1d(Layer):
    """Per-feature batch standardization with learnable scale/shift.

    Training mode normalizes by batch statistics (population variance) and
    updates running statistics as running <- (1 - momentum)*running +
    momentum*batch_stat. Inference mode uses the running statistics and
    leaves no cache, so backward afterwards raises StateError.
    """

    name = "batchnorm"

    def __init__(self, num_features: int, epsilon: float = 1e-5, momentum: float = 0.1):
        if num_features < 1:
            raise ValidationError("batchnorm needs num_features >= 1")
        if epsilon <= 0:
            raise ValidationError("batchnorm epsilon must be positive")
        if not 0.0 < momentum < 1.0:
            raise ValidationError("batchnorm momentum must lie in (0, 1)")
        self.num_features = num_features
        self.epsilon = epsilon
        self.momentum = momentum
        self.gamma = Parameter("gamma", np.ones(num_features))
        self.beta = Parameter("beta", np.zeros(num_features))
        self.running_mean = Parameter("running_mean", np.zeros(num_features), trainable=False)
        self.running_var = Parameter("running_var", np.ones(num_features), trainable=False)
        self._cache = None

    def params(self):
        return [self.gamma, self.beta, self.running_mean, self.running_var]

    def forward(self, x, training=True):
        x = _as_matrix(x)
        if x.shape[1] != self.num_features:
            raise DimensionError(
                f"batchnorm expects {self.num_features} features, got {x.shape[1]}")
        if training:
            if x.shape[0] < 2:
                raise DegenerateBatchError("training-mode batchnorm needs batch size >= 2")
            mean = x.mean(axis=0)
            var = x.var(axis=0)  # population variance
            std = np.sqrt(var + self.epsilon)
            x_hat = (x - mean) / std
            m = self.momentum
            self.running_mean.value = (1 - m) * self.running_mean.value + m * mean
            self.running_var.value = (1 - m) * self.running_var.value + m * var
            self._cache = (x_hat, std)
        else:
            std = np.sqrt(self.running_var.value + self.epsilon)
            x_hat = (x - self.running_mean.value) / std
            self._cache = None
        return self.gamma.value * x_hat + self.beta.value

    def backward(self, grad_out):
        if self._cache is None:
            raise StateError("batchnorm backward needs a training-mode forward")
        grad_out = _as_matrix(grad_out)
        x_hat, std = self._cache
        if grad_out.shape != x_hat.shape:
            raise DimensionError("upstream gradient shape does not match cached input")
        n = x_hat.shape[0]
        self.gamma.grad = (grad_out * x_hat).sum(axis=0)
        self.beta.grad = grad_out.sum(axis=0)
        # full gradient through the batch mean and variance
        g = grad_out * self.gamma.value
        return (g - g.mean(axis=0) - x_hat * (g * x_hat).mean(axis=0)) / std


def _as_sequence(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise DimensionError(f"expected a (batch, channels, length) array, got shape {x.shape}")
    return x


def _windows(x: np.ndarray, kernel_size: int, stride: int) -> np.ndarray:
    """Sliding windows along the last axis: (..., L) -> (..., L_out, kernel_size)."""
    win = np.lib.stride_tricks.sliding_window_view(x, kernel_size, axis=-1)
    return win[..., ::stride, :]


class Conv1d(Layer):
    """1-D cross-correlation with zero padding on both ends."""

    name = "conv1d"

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 stride: int = 1, padding: int = 0, rng: np.random.Generator | None = None):
        if kernel_size < 1 or stride < 1 or padding < 0:
            raise ValidationError("conv1d needs kernel_size/stride >= 1 and padding >= 0")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding
        rng = rng or np.random.default_rng(0)
        fan_in = in_channels * kernel_size
        fan_out = out_channels * kernel_size
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        self.kernels = Parameter(
            "kernels", rng.uniform(-limit, limit, (out_channels, in_channels, kernel_size)))
        self.bias = Parameter("bias", np.zeros(out_channels))
        self._cache = None

    def params(self):
        return [self.kernels, self.bias]

    def out_length(self, length: int) -> int:
        padded = length + 2 * self.padding
        if padded < self.kernel_size:
            raise DimensionError(
                f"kernel size {self.kernel_size} exceeds padded input length {padded}")
        return (padded - self.kernel_size) // self.stride + 1

    def output_shape(self, in_shape):
        channels, length = in_shape
        return (self.out_channels, self.out_length(length))

    def forward(self, x, training=True):
        x = _as_sequence(x)
        if x.shape[1] != self.in_channels:
            raise DimensionError(
                f"conv1d expects {self.in_channels} input channels, got {x.shape[1]}")
        self.out_length(x.shape[2])  # raises if the kernel does not fit
        p = self.padding
        xp = np.pad(x, ((0, 0), (0, 0), (p, p))) if p else x
        win = _windows(xp, self.kernel_size, self.stride)  # (B, C_in, L_out, K)
        # sum over in-channels and kernel taps
        out = np.einsum("bclk,ock->bol", win, self.kernels.value, optimize=True)
        out += self.bias.value[None, :, None]
        self._cache = (x.shape, win) if training else None
        return out

    def backward(self, grad_out):
        if self._cache is None:
            raise StateError("conv1d backward called without a training-mode forward")
        grad_out = _as_sequence(grad_out)
        (b, c_in, length), win = self._cache
        self.kernels.grad = np.einsum("bol,bclk->ock", grad_out, win, optimize=True)
        self.bias.grad = grad_out.sum(axis=(0, 2))
        # scatter each upstream value back over its input window
        p = self.padding
        grad_padded = np.zeros((b, c_in, length + 2 * p))
        contrib = np.einsum("bol,ock->bclk", grad_out, self.kernels.value, optimize=True)
        l_out = grad_out.shape[2]
        starts = np.arange(l_out) * self.stride
        for k in range(self.kernel_size):
            np.add.at(grad_padded, (slice(None), slice(None), starts + k), contrib[..., k])
        return grad_padded[:, :, p:length + p] if p else grad_padded


class MaxPool1d(Layer):
    """Window maxima along the last axis; backward routes to the argmax (first on ties)."""

    name = "maxpool1d"

    def __init__(self, kernel_size: int, stride: int | None = None):
        if kernel_size < 1:
            raise ValidationError("maxpool1d needs kernel_size >= 1")
        self.kernel_size = kernel_size
        self.stride = stride if stride is not None else kernel_size
        self._cache = None

    def out_length(self, length: int) -> int:
        if length < self.kernel_size:
            raise DimensionError(
                f"input length {length} shorter than pooling window {self.kernel_size}")
        return (length - self.kernel_size) // self.stride + 1

    def output_shape(self, in_shape):
        channels, length = in_shape
        return (channels, self.out_length(length))

    def forward(self, x, training=True):
        x = _as_sequence(x)
        self.out_length(x.shape[2])
        win = _windows(x, self.kernel_size, self.stride)  # (B, C, L_out, K)
        arg = win.argmax(axis=-1)  # first index on ties
        out = np.take_along_axis(win, arg[..., None], axis=-1)[..., 0]
        self._cache = (x.shape, arg) if training else None
        return out

    def backward(self, grad_out):
        if self._cache is None:
            raise StateError("maxpool1d backward called without a training-mode forward")
        grad_out = _as_sequence(grad_out)
        in_shape, arg = self._cache
        grad_in = np.zeros(in_shape)
        b, c, l_out = arg.shape
        positions = arg + np.arange(l_out) * self.stride  # absolute input index per window
        bi, ci = np.ogrid[:b, :c]
        bi = np.broadcast_to(bi, positions.shape)
        ci = np.broadcast_to(ci, positions.shape)
        np.add.at(grad_in, (bi, ci, positions), grad_out)
        return grad_in


class Activation(Layer):
    """Elementwise nonlinearity: relu, leaky_relu(slope), sigmoid, or tanh."""

    name = "activation"

    def __init__(self, kind: str, slope: float = 0.01):
        kind = kind.lower()
        if kind not in ACTIVATION_KINDS:
            raise ValidationError(f"unknown activation {kind!r}; choose from {ACTIVATION_KINDS}")
        if kind == "leaky_relu" and not 0.0 < slope < 1.0:
            raise ValidationError("leaky_relu slope must lie in (0, 1)")
        self.kind = kind
        self.slope = slope
        self._cache = None

    def forward(self, x, training=True):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "relu":
            out = np.maximum(x, 0.0)
            cache = x
        elif self.kind == "leaky_relu":
            out = np.where(x >= 0.0, x, self.slope * x)
            cache = x
        elif self.kind == "sigmoid":
            out = _sigmoid(x)
            cache = out
        else:  # tanh
            out = np.tanh(x)
            cache = out
        self._cache = cache if training else None
        return out

    def backward(self, grad_out):
        if self._cache is None:
            raise StateError("activation backward called without a training-mode forward")
        grad_out = np.asarray(grad_out, dtype=np.float64)
        c = self._cache
        if grad_out.shape != c.shape:
            raise DimensionError("upstream gradient shape does not match cached activation")
        if self.kind == "relu":
            return grad_out * (c > 0.0)
        if self.kind == "leaky_relu":
            return grad_out * np.where(c >= 0.0, 1.0, self.slope)
        if self.kind == "sigmoid":
            return grad_out * c * (1.0 - c)
        return grad_out * (1.0 - c * c)


class ExpandChannel(Layer):
    """(batch, length) -> (batch, 1, length); entry point of the convolutional stack."""

    name = "expand_channel"

    def output_shape(self, in_shape):
        (length,) = in_shape
        return (1, length)

    def forward(self, x, training=True):
        return _as_matrix(x)[:, None, :]

    def backward(self, grad_out):
        return _as_sequence(grad_out)[:, 0, :]


class Flatten(Layer):
    """(batch, channels, length) -> (batch, channels*length)."""

    name = "flatten"

    def __init__(self):
        self._cache = None

    def output_shape(self, in_shape):
        channels, length = in_shape
        return (channels * length,)

    def forward(self, x, training=True):
        x = _as_sequence(x)
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad_out):
        if self._cache is None:
            raise StateError("flatten backward called without a forward")
        return _as_matrix(grad_out).reshape(self._cache)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # stable in both tails
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out
