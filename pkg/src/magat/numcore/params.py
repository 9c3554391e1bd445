"""Named parameter collections and the SGD update."""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .tensor import Tensor


class ParamSet:
    """Ordered map of unique identifiers to trainable tensors.

    Gradients live on the tensors themselves; the set guarantees unique
    names and offers bulk operations (zero, update, copy-in).
    """

    def __init__(self, params: dict[str, Tensor] | None = None):
        self._params: dict[str, Tensor] = {}
        if params:
            for name, tensor in params.items():
                self.add(name, tensor)

    def add(self, name: str, tensor: Tensor) -> None:
        if name in self._params:
            raise ValueError(f"duplicate parameter identifier: {name!r}")
        self._params[name] = tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def items(self):
        return self._params.items()

    def tensors(self):
        return self._params.values()

    def n_values(self) -> int:
        return sum(t.size for t in self._params.values())

    def zero_grad(self) -> None:
        for t in self._params.values():
            t.grad = None

    def load_values(self, values: dict[str, np.ndarray], strict: bool = True) -> list[str]:
        """Copy raw arrays into matching parameters; returns names applied."""
        applied = []
        for name, arr in values.items():
            if name not in self._params:
                if strict:
                    raise KeyError(f"checkpoint entry {name!r} has no matching parameter")
                continue
            target = self._params[name]
            if tuple(arr.shape) != target.shape:
                raise ValueError(f"shape mismatch for {name!r}: "
                                 f"checkpoint {arr.shape}, parameter {target.shape}")
            target.data = arr.astype(target.dtype)
            applied.append(name)
        return applied


def sgd_step(params: ParamSet, lr: float) -> ParamSet:
    """Plain gradient descent: p <- p - lr * grad, then gradients are cleared."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    for name, t in params.items():
        if t.grad is None:
            raise ValueError(f"parameter {name!r} has no gradient; run backward first")
        if t.grad.shape != t.data.shape:
            raise ValueError(f"gradient shape mismatch on {name!r}")
        t.data -= (lr * t.grad).astype(t.dtype)
        t.grad = None
    return params
