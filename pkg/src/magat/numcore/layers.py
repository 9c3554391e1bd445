"""Layer building blocks with automatic parameter registration.

A Module collects its trainable tensors by walking attributes; nested
modules and module lists contribute dotted names. Initialization draws
from an explicit generator so identical seeds give identical models.
"""

from __future__ import annotations

import numpy as np

from . import ops
from .norm import CbnParams, RunningStats, batch_norm, cond_batch_norm
from .params import ParamSet
from .tensor import Tensor


class Module:
    def params(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, value in vars(self).items():
            if isinstance(value, Tensor):
                if value.requires_grad:
                    out[name] = value
            elif isinstance(value, CbnParams):
                out[f"{name}.gamma"] = value.gamma
                out[f"{name}.beta"] = value.beta
            elif isinstance(value, Module):
                for k, v in value.params().items():
                    out[f"{name}.{k}"] = v
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        for k, v in item.params().items():
                            out[f"{name}.{i}.{k}"] = v
                    elif isinstance(item, Tensor) and item.requires_grad:
                        out[f"{name}.{i}"] = item
        return out

    def param_set(self, prefix: str = "") -> ParamSet:
        ps = ParamSet()
        for name, tensor in self.params().items():
            ps.add(prefix + name, tensor)
        return ps


def he_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, dtype) -> Tensor:
    scale = np.sqrt(2.0 / fan_in)
    return Tensor((rng.standard_normal(shape) * scale).astype(dtype), requires_grad=True)


class Linear(Module):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator,
                 bias: bool = True, dtype=np.float32):
        self.weight = he_init(rng, (out_dim, in_dim), in_dim, dtype)
        self.bias = Tensor(np.zeros(out_dim, dtype=dtype), requires_grad=True) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = x @ self.weight.T
        if self.bias is not None:
            out = out + self.bias
        return out


class Conv2d(Module):
    def __init__(self, in_ch: int, out_ch: int, kernel: int, rng: np.random.Generator,
                 stride: int = 1, padding: int = 0, bias: bool = True, dtype=np.float32):
        fan_in = in_ch * kernel * kernel
        self.weight = he_init(rng, (out_ch, in_ch, kernel, kernel), fan_in, dtype)
        self.bias = Tensor(np.zeros(out_ch, dtype=dtype), requires_grad=True) if bias else None
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.weight, self.bias, self.stride, self.padding)


class ConvTranspose2d(Module):
    def __init__(self, in_ch: int, out_ch: int, kernel: int, rng: np.random.Generator,
                 stride: int = 1, padding: int = 0, output_padding: int = 0,
                 bias: bool = True, dtype=np.float32):
        fan_in = in_ch * kernel * kernel
        self.weight = he_init(rng, (in_ch, out_ch, kernel, kernel), fan_in, dtype)
        self.bias = Tensor(np.zeros(out_ch, dtype=dtype), requires_grad=True) if bias else None
        self.stride = stride
        self.padding = padding
        self.output_padding = output_padding

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv_transpose2d(x, self.weight, self.bias, self.stride,
                                    self.padding, self.output_padding)


class BatchNorm2d(Module):
    def __init__(self, channels: int, eps: float = 1e-5, dtype=np.float32):
        self.gamma = Tensor(np.ones(channels, dtype=dtype), requires_grad=True)
        self.beta = Tensor(np.zeros(channels, dtype=dtype), requires_grad=True)
        self.eps = eps
        self.running = RunningStats.for_channels(channels)

    def __call__(self, x: Tensor, months=None, mode: str = "train") -> Tensor:
        return batch_norm(x, self.gamma, self.beta, mode, self.running, self.eps)


class CondBatchNorm2d(Module):
    def __init__(self, channels: int, eps: float = 1e-5, dtype=np.float32):
        self.cbn = CbnParams.identity(channels, eps, dtype)
        self.running = RunningStats.for_channels(channels)

    def __call__(self, x: Tensor, months=None, mode: str = "train") -> Tensor:
        if months is None:
            raise ValueError("month-conditioned normalization needs per-sample months")
        return cond_batch_norm(x, months, self.cbn, mode, self.running)


def make_norm(kind: str, channels: int, dtype=np.float32) -> Module:
    if kind == "bn":
        return BatchNorm2d(channels, dtype=dtype)
    if kind == "cbn":
        return CondBatchNorm2d(channels, dtype=dtype)
    raise ValueError(f"unknown normalization kind: {kind!r}")
