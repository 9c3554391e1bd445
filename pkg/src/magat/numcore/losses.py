"""Training losses."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor

PROB_CLAMP = 1e-7


def bce_loss(p: Tensor, y: np.ndarray) -> Tensor:
    """Mean binary cross-entropy. Probabilities clamped to [1e-7, 1 - 1e-7]."""
    y = np.asarray(y)
    if y.shape != p.shape:
        raise ValueError(f"probability/label length mismatch: {p.shape} vs {y.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary")
    y = y.astype(p.dtype)
    pc = p.clip(PROB_CLAMP, 1.0 - PROB_CLAMP)
    losses = -(Tensor(y) * pc.log() + Tensor(1.0 - y) * (1.0 - pc).log())
    return losses.mean()


def mse_loss(pred: Tensor, target: np.ndarray) -> Tensor:
    target = np.asarray(target)
    if target.shape != pred.shape:
        raise ValueError(f"prediction/target shape mismatch: {pred.shape} vs {target.shape}")
    diff = pred - Tensor(target.astype(pred.dtype))
    return (diff * diff).mean()
