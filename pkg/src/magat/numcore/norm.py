"""Batch normalization, plain and month-conditioned.

The conditioned variant keeps one (gamma, beta) row per calendar month
and selects the affine transform per sample; batch statistics are shared
across the whole batch either way. Eval mode normalizes with running
statistics accumulated during training (momentum 0.1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Tensor, take_rows

N_MONTHS = 12
DEFAULT_EPS = 1e-5
DEFAULT_MOMENTUM = 0.1


@dataclass
class CbnParams:
    """Per-month affine parameters: gamma and beta are (12, C) tensors."""

    gamma: Tensor
    beta: Tensor
    epsilon: float = DEFAULT_EPS

    def __post_init__(self):
        if self.gamma.shape[0] != N_MONTHS or self.beta.shape[0] != N_MONTHS:
            raise ValueError("conditioned normalization needs exactly 12 parameter rows")
        if self.gamma.shape != self.beta.shape:
            raise ValueError("gamma and beta shapes differ")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @staticmethod
    def identity(channels: int, epsilon: float = DEFAULT_EPS, dtype=np.float32) -> "CbnParams":
        return CbnParams(
            gamma=Tensor(np.ones((N_MONTHS, channels), dtype=dtype), requires_grad=True),
            beta=Tensor(np.zeros((N_MONTHS, channels), dtype=dtype), requires_grad=True),
            epsilon=epsilon)


@dataclass
class RunningStats:
    """Exponential-moving-average channel statistics for eval-mode normalization.

    Starts at (mean 0, var 1) so a freshly built model can run eval mode;
    each train-mode batch folds its statistics in with the momentum.
    """

    mean: np.ndarray
    var: np.ndarray
    momentum: float = DEFAULT_MOMENTUM

    @staticmethod
    def for_channels(channels: int, momentum: float = DEFAULT_MOMENTUM) -> "RunningStats":
        return RunningStats(mean=np.zeros(channels, dtype=np.float64),
                            var=np.ones(channels, dtype=np.float64),
                            momentum=momentum)

    def update(self, batch_mean: np.ndarray, batch_var: np.ndarray) -> None:
        m = self.momentum
        self.mean = (1.0 - m) * self.mean + m * batch_mean
        self.var = (1.0 - m) * self.var + m * batch_var


def _check_months(months: np.ndarray, batch: int) -> np.ndarray:
    months = np.asarray(months)
    if months.shape != (batch,):
        raise ValueError(f"months must be shaped ({batch},), got {months.shape}")
    if months.min() < 1 or months.max() > N_MONTHS:
        raise ValueError(f"month indices must lie in 1..12, got range "
                         f"[{months.min()}, {months.max()}]")
    return months.astype(np.int64)


def _standardize(x: Tensor, mode: str, eps: float, running: RunningStats | None):
    """Shared normalization core; returns (xhat, batch served by train mode)."""
    if mode == "train":
        if x.shape[0] < 2:
            raise ValueError("train-mode batch normalization needs batch size >= 2")
        mu = x.mean(axis=(0, 2, 3), keepdims=True)
        var = ((x - mu) ** 2).mean(axis=(0, 2, 3), keepdims=True)
        if running is not None:
            running.update(mu.data.reshape(-1), var.data.reshape(-1))
        return (x - mu) / (var + eps).sqrt()
    if mode == "eval":
        if running is None:
            raise ValueError("eval-mode normalization requires running statistics")
        mu = running.mean.reshape(1, -1, 1, 1).astype(x.dtype)
        sd = np.sqrt(running.var.reshape(1, -1, 1, 1) + eps).astype(x.dtype)
        return (x - Tensor(mu)) * Tensor(1.0 / sd)
    raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")


def batch_norm(x: Tensor, gamma: Tensor, beta: Tensor, mode: str,
               running: RunningStats | None = None, eps: float = DEFAULT_EPS) -> Tensor:
    """Unconditional batch norm over (B,C,H,W) with (C,) affine parameters."""
    xhat = _standardize(x, mode, eps, running)
    C = x.shape[1]
    return xhat * gamma.reshape(1, C, 1, 1) + beta.reshape(1, C, 1, 1)


def cond_batch_norm(x: Tensor, months: np.ndarray, params: CbnParams, mode: str,
                    running: RunningStats | None = None) -> Tensor:
    """Month-conditioned batch norm: affine row chosen by each sample's month."""
    B, C = x.shape[0], x.shape[1]
    months = _check_months(months, B)
    xhat = _standardize(x, mode, params.epsilon, running)
    gamma_rows = take_rows(params.gamma, months - 1).reshape(B, C, 1, 1)
    beta_rows = take_rows(params.beta, months - 1).reshape(B, C, 1, 1)
    return xhat * gamma_rows + beta_rows
