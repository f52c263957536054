"""Loss functions: binary cross-entropy on probabilities and 2-way softmax cross-entropy."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError, ValidationError

PROB_CLAMP = 1e-7


def _check_labels(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if not np.isin(labels, (0, 1)).all():
        raise ValidationError("labels must be 0 or 1")
    return labels.astype(np.float64)


def binary_cross_entropy(probs, labels) -> tuple[float, np.ndarray]:
    """Mean of -[y log p + (1-y) log(1-p)] and its gradient w.r.t. probs.

    Probabilities are clamped to [1e-7, 1 - 1e-7] before the logarithm.
    """
    probs = np.asarray(probs, dtype=np.float64).reshape(-1)
    y = _check_labels(labels).reshape(-1)
    if probs.shape != y.shape:
        raise DimensionError(f"{probs.shape[0]} probabilities vs {y.shape[0]} labels")
    p = np.clip(probs, PROB_CLAMP, 1.0 - PROB_CLAMP)
    loss = float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))
    grad = (p - y) / (p * (1.0 - p)) / p.size
    return loss, grad


def softmax_cross_entropy(logits, labels) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over 2 logits per example; gradient w.r.t. the logits.

    Log-sum-exp is stabilized by max subtraction; grad = (softmax - onehot)/batch.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2 or logits.shape[1] != 2:
        raise DimensionError(f"expected (batch, 2) logits, got shape {logits.shape}")
    y = _check_labels(labels).astype(np.intp).reshape(-1)
    if y.shape[0] != logits.shape[0]:
        raise DimensionError(f"{logits.shape[0]} logit rows vs {y.shape[0]} labels")
    n = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_z[:, None]
    loss = float(-log_probs[np.arange(n), y].mean())
    grad = np.exp(log_probs)
    grad[np.arange(n), y] -= 1.0
    return loss, grad / n
