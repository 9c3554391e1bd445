"""Differentiable primitives beyond basic arithmetic.

Activations are dedicated ops (rather than compositions) so that large
inputs never route through an unguarded ``exp`` on the dead branch, and
the convolutions use a shift-and-add formulation: one BLAS contraction
per kernel offset, which is fast at patch scale without an im2col buffer.
"""

from __future__ import annotations

import numpy as np

from .tensor import Array, Tensor

ELU_ALPHA = 1.0
LEAKY_RELU_SLOPE = 0.2


def elu(x: Tensor, alpha: float = ELU_ALPHA) -> Tensor:
    pos = x.data > 0
    expm1 = alpha * np.expm1(np.minimum(x.data, 0.0))
    out = np.where(pos, x.data, expm1)

    def backward(g: Array):
        return (g * np.where(pos, 1.0, expm1 + alpha),)

    return Tensor._result(out, (x,), backward)


def leaky_relu(x: Tensor, slope: float = LEAKY_RELU_SLOPE) -> Tensor:
    pos = x.data > 0
    out = np.where(pos, x.data, slope * x.data)

    def backward(g: Array):
        return (g * np.where(pos, 1.0, slope),)

    return Tensor._result(out, (x,), backward)


def sigmoid(x: Tensor) -> Tensor:
    d = x.data
    out = np.empty_like(d)
    pos = d >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-d[pos]))
    ex = np.exp(d[~pos])
    out[~pos] = ex / (1.0 + ex)

    def backward(g: Array):
        return (g * out * (1.0 - out),)

    return Tensor._result(out, (x,), backward)


def apply_activation(x: Tensor, kind: str) -> Tensor:
    """Elementwise activation dispatch; rejects non-finite input."""
    if not np.all(np.isfinite(x.data)):
        raise ValueError(f"activation '{kind}' received non-finite input")
    if kind == "elu":
        return elu(x)
    if kind == "leaky_relu":
        return leaky_relu(x)
    if kind == "sigmoid":
        return sigmoid(x)
    raise ValueError(f"unknown activation kind: {kind!r}")


def dropout(x: Tensor, p: float, mode: str, rng: np.random.Generator | None = None) -> Tensor:
    """Inverted dropout: train zeroes with prob p and rescales by 1/(1-p)."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"drop probability must be in [0, 1), got {p}")
    if mode == "eval" or p == 0.0:
        return x
    if mode != "train":
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    if rng is None:
        raise ValueError("train-mode dropout requires a seeded generator")
    keep = (rng.random(x.shape) >= p).astype(x.dtype) / (1.0 - p)

    def backward(g: Array):
        return (g * keep,)

    return Tensor._result(x.data * keep, (x,), backward)


def _conv_geometry(size: int, kernel: int, stride: int, padding: int) -> int:
    out = (size + 2 * padding - kernel) // stride + 1
    if out < 1:
        raise ValueError(
            f"convolution output collapsed: size={size} kernel={kernel} "
            f"stride={stride} padding={padding}")
    return out


def conv2d(x: Tensor, weight: Tensor, bias: Tensor | None = None,
           stride: int = 1, padding: int = 0) -> Tensor:
    """2-D correlation. x: (B,C,H,W), weight: (F,C,kh,kw) -> (B,F,OH,OW)."""
    B, C, H, W = x.shape
    F, Cw, kh, kw = weight.shape
    if C != Cw:
        raise ValueError(f"channel mismatch: input {C}, weight {Cw}")
    OH = _conv_geometry(H, kh, stride, padding)
    OW = _conv_geometry(W, kw, stride, padding)
    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))

    out = np.zeros((B, F, OH, OW), dtype=x.dtype)
    for a in range(kh):
        for b in range(kw):
            xs = xp[:, :, a:a + stride * OH:stride, b:b + stride * OW:stride]
            # (B,C,OH,OW) x (F,C) -> (B,OH,OW,F)
            out += np.moveaxis(np.tensordot(xs, weight.data[:, :, a, b], axes=([1], [1])), 3, 1)
    if bias is not None:
        out += bias.data[None, :, None, None]

    def backward(g: Array):
        dxp = np.zeros_like(xp)
        dw = np.zeros_like(weight.data)
        for a in range(kh):
            for b in range(kw):
                xs = xp[:, :, a:a + stride * OH:stride, b:b + stride * OW:stride]
                dw[:, :, a, b] = np.tensordot(g, xs, axes=([0, 2, 3], [0, 2, 3]))
                dxp[:, :, a:a + stride * OH:stride, b:b + stride * OW:stride] += \
                    np.moveaxis(np.tensordot(g, weight.data[:, :, a, b], axes=([1], [0])), 3, 1)
        dx = dxp[:, :, padding:padding + H, padding:padding + W] if padding else dxp
        grads = [dx, dw]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return tuple(grads)

    parents = (x, weight) if bias is None else (x, weight, bias)
    return Tensor._result(out, parents, backward)


def conv_transpose2d(x: Tensor, weight: Tensor, bias: Tensor | None = None,
                     stride: int = 1, padding: int = 0, output_padding: int = 0) -> Tensor:
    """Transposed 2-D convolution. x: (B,C,H,W), weight: (C,F,kh,kw).

    Output side = (H-1)*stride - 2*padding + kh + output_padding.
    """
    B, C, H, W = x.shape
    Cw, F, kh, kw = weight.shape
    if C != Cw:
        raise ValueError(f"channel mismatch: input {C}, weight {Cw}")
    if not 0 <= output_padding < stride and not (stride == 1 and output_padding == 0):
        raise ValueError("output_padding must be < stride")
    full_h = (H - 1) * stride + kh
    full_w = (W - 1) * stride + kw
    OH = full_h - 2 * padding + output_padding
    OW = full_w - 2 * padding + output_padding
    if OH < 1 or OW < 1:
        raise ValueError("transposed convolution output collapsed")

    buf = np.zeros((B, F, full_h + output_padding, full_w + output_padding), dtype=x.dtype)
    for a in range(kh):
        for b in range(kw):
            buf[:, :, a:a + stride * H:stride, b:b + stride * W:stride] += \
                np.moveaxis(np.tensordot(x.data, weight.data[:, :, a, b], axes=([1], [0])), 3, 1)
    out = buf[:, :, padding:padding + OH, padding:padding + OW]
    if bias is not None:
        out = out + bias.data[None, :, None, None]

    def backward(g: Array):
        gbuf = np.zeros((B, F, full_h + output_padding, full_w + output_padding), dtype=g.dtype)
        gbuf[:, :, padding:padding + OH, padding:padding + OW] = g
        dx = np.zeros_like(x.data)
        dw = np.zeros_like(weight.data)
        for a in range(kh):
            for b in range(kw):
                gs = gbuf[:, :, a:a + stride * H:stride, b:b + stride * W:stride]
                dx += np.moveaxis(np.tensordot(gs, weight.data[:, :, a, b], axes=([1], [1])), 3, 1)
                dw[:, :, a, b] = np.tensordot(x.data, gs, axes=([0, 2, 3], [0, 2, 3]))
        grads = [dx, dw]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return tuple(grads)

    parents = (x, weight) if bias is None else (x, weight, bias)
    return Tensor._result(np.ascontiguousarray(out), parents, backward)


def global_avg_pool(x: Tensor) -> Tensor:
    """(B,C,H,W) -> (B,C) spatial mean."""
    return x.mean(axis=(2, 3))
