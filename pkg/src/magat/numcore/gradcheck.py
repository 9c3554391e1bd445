"""Finite-difference verification of analytic gradients.

Every trainable operation in this package is certified against central
differences in float64. The checker perturbs raw parameter storage in
place, so the loss closure must rebuild its forward pass from the
current parameter values on every call.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .params import ParamSet
from .tensor import Tensor

DEFAULT_STEP = 1e-5


def grad_check(loss_fn: Callable[[], Tensor], params: ParamSet,
               step: float = DEFAULT_STEP) -> float:
    """Max relative error between analytic and central-difference gradients.

    Relative error uses max(|analytic|, |numeric|, 1) as denominator so
    near-zero gradients are compared absolutely.
    """
    first = loss_fn()
    second = loss_fn()
    if first.data.size != 1:
        raise ValueError("grad_check requires a scalar loss")
    if not np.array_equal(first.data, second.data):
        raise ValueError("loss function is not deterministic; cannot verify gradients")

    for name, t in params.items():
        if t.dtype != np.float64:
            raise ValueError(f"grad_check requires float64 parameters; {name!r} is {t.dtype}")

    params.zero_grad()
    loss_fn().backward()
    analytic = {name: (t.grad.copy() if t.grad is not None else np.zeros_like(t.data))
                for name, t in params.items()}

    worst = 0.0
    for name, t in params.items():
        flat = t.data.reshape(-1)
        a_flat = analytic[name].reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            hi = float(loss_fn().data)
            flat[i] = orig - step
            lo = float(loss_fn().data)
            flat[i] = orig
            numeric = (hi - lo) / (2.0 * step)
            denom = max(abs(a_flat[i]), abs(numeric), 1.0)
            worst = max(worst, abs(a_flat[i] - numeric) / denom)
    params.zero_grad()
    return worst
