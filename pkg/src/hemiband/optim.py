"""Eight gradient-based update rules sharing one step contract.

Each optimizer owns per-parameter accumulators, initialized to zeros on the
first step. step(params, grads) updates the parameter arrays in place and
increments the step counter t by exactly one. Shape mismatches raise
DimensionError; non-finite gradients raise NumericError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError, ValidationError

OPTIMIZER_NAMES = ("sgd", "adagrad", "adadelta", "rmsprop", "adam", "adamax", "nadam", "ftrl")


@dataclass
class OptimizerConfig:
    """Hyperparameters for any of the eight rules; None fields take per-rule defaults.

    rho defaults to 0.9 for rmsprop and 0.95 for adadelta; epsilon defaults to
    1e-8 for the adam family, 1e-10 for adagrad, and 1e-6 for adadelta.
    """

    rule: str
    learning_rate: float
    momentum: float = 0.0
    rho: float | None = None
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float | None = None
    l1: float = 0.0
    l2: float = 0.0
    beta_ftrl: float = 1.0

    def __post_init__(self):
        self.rule = str(self.rule).lower()
        if self.rule not in OPTIMIZER_NAMES:
            raise ValidationError(f"unknown optimizer {self.rule!r}; choose from {OPTIMIZER_NAMES}")
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if self.momentum < 0:
            raise ValidationError("momentum must be >= 0")
        if self.rho is not None and not 0.0 < self.rho < 1.0:
            raise ValidationError("rho must lie in (0, 1)")
        for name in ("beta1", "beta2"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1)")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if self.l1 < 0 or self.l2 < 0 or self.beta_ftrl < 0:
            raise ValidationError("l1, l2 and beta_ftrl must be >= 0")


class Optimizer:
    """Base: accumulator management and the shared step() skeleton."""

    #: accumulator slot names, all initialized to zeros_like(param)
    slots: tuple[str, ...] = ()

    def __init__(self, config: OptimizerConfig):
        self.config = config
        self.t = 0
        self._state: list[dict[str, np.ndarray]] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if len(params) != len(grads):
            raise DimensionError(f"{len(params)} params vs {len(grads)} grads")
        if self._state is None:
            self._state = [{s: np.zeros_like(p) for s in self.slots} for p in params]
        if len(self._state) != len(params):
            raise DimensionError("parameter list length changed between steps")
        for p, g, st in zip(params, grads, self._state):
            g = np.asarray(g, dtype=np.float64)
            if g.shape != p.shape:
                raise DimensionError(f"grad shape {g.shape} vs param shape {p.shape}")
            if not np.all(np.isfinite(g)):
                raise NumericError("non-finite gradient")
        self.t += 1
        for p, g, st in zip(params, grads, self._state):
            self._update(p, np.asarray(g, dtype=np.float64), st)

    def _update(self, p: np.ndarray, g: np.ndarray, st: dict) -> None:
        raise NotImplementedError


class SGD(Optimizer):
    """v <- momentum*v + g; w <- w - lr*v."""

    slots = ("velocity",)

    def _update(self, p, g, st):
        st["velocity"] = self.config.momentum * st["velocity"] + g
        p -= self.config.learning_rate * st["velocity"]


class Adagrad(Optimizer):
    """G <- G + g^2; w <- w - lr*g/(sqrt(G) + eps)."""

    slots = ("sq_sum",)

    def __init__(self, config):
        super().__init__(config)
        self.epsilon = config.epsilon if config.epsilon is not None else 1e-10

    def _update(self, p, g, st):
        st["sq_sum"] += g * g
        p -= self.config.learning_rate * g / (np.sqrt(st["sq_sum"]) + self.epsilon)


class RMSprop(Optimizer):
    """v <- rho*v + (1-rho)*g^2; w <- w - lr*g/(sqrt(v) + eps)."""

    slots = ("sq_avg",)

    def __init__(self, config):
        super().__init__(config)
        self.rho = config.rho if config.rho is not None else 0.9
        self.epsilon = config.epsilon if config.epsilon is not None else 1e-8

    def _update(self, p, g, st):
        st["sq_avg"] = self.rho * st["sq_avg"] + (1.0 - self.rho) * g * g
        p -= self.config.learning_rate * g / (np.sqrt(st["sq_avg"]) + self.epsilon)


class Adadelta(Optimizer):
    """Scale-free rule driven by decayed averages of g^2 and of the updates.

    E[g^2] <- rho*E[g^2] + (1-rho)*g^2
    dw      = -(sqrt(E[dw^2] + eps)/sqrt(E[g^2] + eps)) * g
    E[dw^2] <- rho*E[dw^2] + (1-rho)*dw^2
    w      <- w + lr*dw            (lr is a plain multiplier, 1.0 by convention)
    """

    slots = ("sq_grad_avg", "sq_delta_avg")

    def __init__(self, config):
        super().__init__(config)
        self.rho = config.rho if config.rho is not None else 0.95
        self.epsilon = config.epsilon if config.epsilon is not None else 1e-6

    def _update(self, p, g, st):
        rho, eps = self.rho, self.epsilon
        st["sq_grad_avg"] = rho * st["sq_grad_avg"] + (1.0 - rho) * g * g
        delta = -(np.sqrt(st["sq_delta_avg"] + eps) / np.sqrt(st["sq_grad_avg"] + eps)) * g
        st["sq_delta_avg"] = rho * st["sq_delta_avg"] + (1.0 - rho) * delta * delta
        p += self.config.learning_rate * delta


class Adam(Optimizer):
    """Bias-corrected first/second moments: w <- w - lr*m_hat/(sqrt(v_hat) + eps)."""

    slots = ("m", "v")

    def __init__(self, config):
        super().__init__(config)
        self.epsilon = config.epsilon if config.epsilon is not None else 1e-8

    def _update(self, p, g, st):
        b1, b2 = self.config.beta1, self.config.beta2
        st["m"] = b1 * st["m"] + (1.0 - b1) * g
        st["v"] = b2 * st["v"] + (1.0 - b2) * g * g
        m_hat = st["m"] / (1.0 - b1 ** self.t)
        v_hat = st["v"] / (1.0 - b2 ** self.t)
        p -= self.config.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)


class AdaMax(Optimizer):
    """Adam's m with an infinity-norm scale: u <- max(beta2*u, |g|)."""

    slots = ("m", "u")

    def __init__(self, config):
        super().__init__(config)
        self.epsilon = config.epsilon if config.epsilon is not None else 1e-8

    def _update(self, p, g, st):
        b1, b2 = self.config.beta1, self.config.beta2
        st["m"] = b1 * st["m"] + (1.0 - b1) * g
        st["u"] = np.maximum(b2 * st["u"], np.abs(g))
        p -= (self.config.learning_rate / (1.0 - b1 ** self.t)) * st["m"] / (st["u"] + self.epsilon)


class NAdam(Optimizer):
    """Adam with a Nesterov look-ahead numerator: beta1*m_hat + (1-beta1)*g/(1-beta1^t)."""

    slots = ("m", "v")

    def __init__(self, config):
        super().__init__(config)
        self.epsilon = config.epsilon if config.epsilon is not None else 1e-8

    def _update(self, p, g, st):
        b1, b2 = self.config.beta1, self.config.beta2
        st["m"] = b1 * st["m"] + (1.0 - b1) * g
        st["v"] = b2 * st["v"] + (1.0 - b2) * g * g
        m_hat = st["m"] / (1.0 - b1 ** self.t)
        v_hat = st["v"] / (1.0 - b2 ** self.t)
        numerator = b1 * m_hat + (1.0 - b1) * g / (1.0 - b1 ** self.t)
        p -= self.config.learning_rate * numerator / (np.sqrt(v_hat) + self.epsilon)


class FTRL(Optimizer):
    """Follow-the-regularized-leader with L1 sparsity thresholding.

    sigma = (sqrt(n + g^2) - sqrt(n))/lr; z <- z + g - sigma*w; n <- n + g^2;
    w = 0 where |z| <= l1, else -(z - sign(z)*l1)/((beta + sqrt(n))/lr + l2).
    """

    slots = ("z", "n")

    def _update(self, p, g, st):
        lr = self.config.learning_rate
        sigma = (np.sqrt(st["n"] + g * g) - np.sqrt(st["n"])) / lr
        st["z"] += g - sigma * p
        st["n"] += g * g
        z, n = st["z"], st["n"]
        l1, l2, beta = self.config.l1, self.config.l2, self.config.beta_ftrl
        active = np.abs(z) > l1
        denom = (beta + np.sqrt(n)) / lr + l2
        p[...] = np.where(active, -(z - np.sign(z) * l1) / denom, 0.0)


_RULES = {
    "sgd": SGD,
    "adagrad": Adagrad,
    "adadelta": Adadelta,
    "rmsprop": RMSprop,
    "adam": Adam,
    "adamax": AdaMax,
    "nadam": NAdam,
    "ftrl": FTRL,
}


def make_optimizer(name: str, learning_rate: float, **overrides) -> Optimizer:
    """Build an optimizer by name (case-insensitive) with per-rule defaults."""
    config = OptimizerConfig(rule=str(name).lower(), learning_rate=learning_rate, **overrides)
    return _RULES[config.rule](config)
