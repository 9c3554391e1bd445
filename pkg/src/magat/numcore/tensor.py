"""Reverse-mode autodiff over dense numpy arrays.

The op set is intentionally small: exactly what the patch extractor, the
graph layers, and their losses need. Gradients flow through a recorded
tape of parent links; ``Tensor.backward()`` walks the graph once in
reverse topological order. float64 is used for gradient verification,
float32 for training; the dtype of a Tensor is whatever its numpy data
carries.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

Array = np.ndarray


def _as_array(value, dtype=None) -> Array:
    arr = np.asarray(value)
    if dtype is not None:
        arr = arr.astype(dtype, copy=False)
    elif arr.dtype.kind != "f":
        arr = arr.astype(np.float64)
    return arr


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        self.data: Array = _as_array(data, dtype)
        self.grad: Array | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[Array], Sequence[Array | None]] | None = None

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def _result(data: Array, parents: Iterable["Tensor"],
                backward: Callable[[Array], Sequence[Array | None]]) -> "Tensor":
        parents = tuple(parents)
        out = Tensor(data)
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._backward = backward
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self) -> int:
        return self.data.size

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def astype(self, dtype) -> "Tensor":
        old = self.data.dtype
        return Tensor._result(
            self.data.astype(dtype), (self,),
            lambda g: (g.astype(old),))

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, grad={self.requires_grad})"

    # -- backward pass --------------------------------------------------------

    def backward(self, grad: Array | None = None) -> None:
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a gradient requires a scalar output")
            grad = np.ones_like(self.data)
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        grads: dict[int, Array] = {id(self): np.asarray(grad, dtype=self.data.dtype)}
        for node in reversed(topo):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    def zero_grad(self) -> None:
        self.grad = None

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other, self.dtype)
        return Tensor._result(
            self.data + other.data, (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(g, other.shape)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.dtype)
        return Tensor._result(
            self.data - other.data, (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(-g, other.shape)))

    def __rsub__(self, other):
        return _coerce(other, self.dtype) - self

    def __neg__(self):
        return Tensor._result(-self.data, (self,), lambda g: (-g,))

    def __mul__(self, other):
        other = _coerce(other, self.dtype)
        return Tensor._result(
            self.data * other.data, (self, other),
            lambda g: (_unbroadcast(g * other.data, self.shape),
                       _unbroadcast(g * self.data, other.shape)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other, self.dtype)
        return Tensor._result(
            self.data / other.data, (self, other),
            lambda g: (_unbroadcast(g / other.data, self.shape),
                       _unbroadcast(-g * self.data / (other.data * other.data), other.shape)))

    def __rtruediv__(self, other):
        return _coerce(other, self.dtype) / self

    def __pow__(self, exponent: float):
        if not np.isscalar(exponent):
            raise TypeError("only scalar exponents are supported")
        out = self.data ** exponent
        return Tensor._result(
            out, (self,),
            lambda g: (g * exponent * self.data ** (exponent - 1),))

    def __matmul__(self, other):
        other = _coerce(other, self.dtype)
        a, b = self.data, other.data

        def backward(g: Array):
            if a.ndim == 1 and b.ndim == 1:
                return g * b, g * a
            if b.ndim == 1:
                ga = _unbroadcast(np.expand_dims(g, -1) * b, a.shape)
                gb = _unbroadcast(np.swapaxes(a, -1, -2) @ np.expand_dims(g, -1),
                                  (b.shape[0], 1))[:, 0]
                return ga, gb
            if a.ndim == 1:
                ga = _unbroadcast(np.expand_dims(g, -2) @ np.swapaxes(b, -1, -2),
                                  (1, a.shape[0]))[0]
                gb = _unbroadcast(np.expand_dims(a, -1) @ np.expand_dims(g, -2), b.shape)
                return ga, gb
            ga = _unbroadcast(g @ np.swapaxes(b, -1, -2), a.shape)
            gb = _unbroadcast(np.swapaxes(a, -1, -2) @ g, b.shape)
            return ga, gb

        return Tensor._result(a @ b, (self, other), backward)

    # -- shape ops ------------------------------------------------------------

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.shape
        return Tensor._result(
            self.data.reshape(shape), (self,),
            lambda g: (g.reshape(old),))

    def transpose(self, axes: Sequence[int]) -> "Tensor":
        axes = tuple(axes)
        inverse = tuple(np.argsort(axes))
        return Tensor._result(
            self.data.transpose(axes), (self,),
            lambda g: (g.transpose(inverse),))

    def swapaxes(self, a: int, b: int) -> "Tensor":
        return Tensor._result(
            np.swapaxes(self.data, a, b), (self,),
            lambda g: (np.swapaxes(g, a, b),))

    @property
    def T(self) -> "Tensor":
        return self.swapaxes(-1, -2)

    def __getitem__(self, index) -> "Tensor":
        shape = self.shape
        dtype = self.dtype
        parts = index if isinstance(index, tuple) else (index,)
        basic = all(isinstance(p, (int, slice, type(None), type(Ellipsis))) for p in parts)

        def backward(g: Array):
            full = np.zeros(shape, dtype=dtype)
            if basic:
                full[index] = g
            else:
                np.add.at(full, index, g)
            return (full,)

        return Tensor._result(self.data[index], (self,), backward)

    # -- reductions -----------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        shape = self.shape

        def backward(g: Array):
            if axis is None:
                return (np.broadcast_to(g, shape).copy(),)
            gg = g if keepdims else np.expand_dims(g, axis)
            return (np.broadcast_to(gg, shape).copy(),)

        return Tensor._result(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        if axis is None:
            count = self.data.size
        else:
            axes = (axis,) if isinstance(axis, int) else tuple(axis)
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # -- elementwise functions ------------------------------------------------

    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return Tensor._result(out, (self,), lambda g: (g * out,))

    def log(self) -> "Tensor":
        return Tensor._result(np.log(self.data), (self,), lambda g: (g / self.data,))

    def sqrt(self) -> "Tensor":
        out = np.sqrt(self.data)
        return Tensor._result(out, (self,), lambda g: (g / (2.0 * out),))

    def clip(self, low: float, high: float) -> "Tensor":
        mask = (self.data >= low) & (self.data <= high)
        return Tensor._result(
            np.clip(self.data, low, high), (self,),
            lambda g: (g * mask,))


def _coerce(value, dtype) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(_as_array(value, dtype))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g: Array):
        return tuple(np.split(g, splits, axis=axis))

    return Tensor._result(
        np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)

    def backward(g: Array):
        return tuple(np.moveaxis(g, axis, 0))

    return Tensor._result(
        np.stack([t.data for t in tensors], axis=axis), tensors, backward)


def where(condition: Array, a: Tensor, b: Tensor) -> Tensor:
    """Select from two tensors with a boolean numpy mask (mask carries no grad)."""
    condition = np.asarray(condition, dtype=bool)
    a = _coerce(a, None)
    b = _coerce(b, None)
    return Tensor._result(
        np.where(condition, a.data, b.data), (a, b),
        lambda g: (_unbroadcast(g * condition, a.shape),
                   _unbroadcast(g * ~condition, b.shape)))


def take_rows(x: Tensor, index: Array) -> Tensor:
    """Gather rows along axis 0 with an integer index array.

    Backward scatter-adds, so repeated indices accumulate gradient.
    """
    index = np.asarray(index)
    shape = x.shape
    dtype = x.dtype

    def backward(g: Array):
        full = np.zeros(shape, dtype=dtype)
        np.add.at(full, index, g)
        return (full,)

    return Tensor._result(x.data[index], (x,), backward)
