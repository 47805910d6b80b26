"""Minimal reverse-mode automatic differentiation over dense numpy arrays.

Scope is deliberately small: 2-D matrix multiply, same-shape elementwise
arithmetic, bias-vector addition along the last axis, the usual pointwise
nonlinearities, concatenation/slicing, max-with-argmax, (log-)softmax, and
embedding-row gather with scatter-add backward.  No general broadcasting,
no higher-order derivatives.

Gradients accumulate (``+=``) into the ``grad`` slot of requires-grad leaf
tensors; calling :func:`backward` twice without zeroing doubles them.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ParameterError, ShapeError

_GRAD_ENABLED = True


@contextmanager
def no_grad():
    """Disable graph recording inside the block (forward values only)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Tensor:
    """Dense float array with an optional gradient slot."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] | None = None
        self._backward: Callable[[np.ndarray], tuple] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}{flag})"

    # small operator sugar; the module-level functions are the primary API
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other) if isinstance(other, Tensor) else scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return neg(self)

    def __getitem__(self, key):
        return slice_(self, key)


class Parameter(Tensor):
    """A named, trainable tensor; the unit of checkpointing."""

    __slots__ = ("name",)

    def __init__(self, data, name: str, dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)
        self.name = name

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape}, dtype={self.data.dtype})"


def _result(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    out = Tensor(data)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


def _check_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: operand shapes {a.shape} and {b.shape} differ")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    data = a.data @ b.data

    def bw(g):
        ga = g @ b.data.T if a.requires_grad else None
        gb = a.data.T @ g if b.requires_grad else None
        return ga, gb

    return _result(data, (a, b), bw)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise add; ``b`` may be a 1-D bias added along the last axis."""
    bias = b.data.ndim == 1 and a.data.ndim > 1
    if bias:
        if a.shape[-1] != b.shape[0]:
            raise ShapeError(f"add: bias length {b.shape[0]} vs last axis of {a.shape}")
    else:
        _check_same_shape("add", a, b)
    data = a.data + b.data

    def bw(g):
        ga = g if a.requires_grad else None
        if not b.requires_grad:
            gb = None
        elif bias:
            gb = g.reshape(-1, g.shape[-1]).sum(axis=0)
        else:
            gb = g
        return ga, gb

    return _result(data, (a, b), bw)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("sub", a, b)

    def bw(g):
        return (g if a.requires_grad else None, -g if b.requires_grad else None)

    return _result(a.data - b.data, (a, b), bw)


def neg(a: Tensor) -> Tensor:
    return _result(-a.data, (a,), lambda g: (-g,))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("mul", a, b)

    def bw(g):
        ga = g * b.data if a.requires_grad else None
        gb = g * a.data if b.requires_grad else None
        return ga, gb

    return _result(a.data * b.data, (a, b), bw)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _result(a.data * c, (a,), lambda g: (g * c,))


def add_constant(a: Tensor, c) -> Tensor:
    """Add a non-differentiable constant (mask, offset); broadcast onto ``a``."""
    c = np.asarray(c, dtype=a.data.dtype)
    if np.broadcast_shapes(a.shape, c.shape) != a.shape:
        raise ShapeError(f"add_constant: constant {c.shape} does not broadcast onto {a.shape}")
    return _result(a.data + c, (a,), lambda g: (g,))


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    data = np.empty_like(x)
    pos = x >= 0
    data[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    data[~pos] = ex / (1.0 + ex)
    return _result(data, (a,), lambda g: (g * data * (1.0 - data),))


def tanh(a: Tensor) -> Tensor:
    data = np.tanh(a.data)
    return _result(data, (a,), lambda g: (g * (1.0 - data * data),))


def exp(a: Tensor) -> Tensor:
    data = np.exp(a.data)
    return _result(data, (a,), lambda g: (g * data,))


def log(a: Tensor) -> Tensor:
    return _result(np.log(a.data), (a,), lambda g: (g / a.data,))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ParameterError("concat of an empty sequence")
    data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def bw(g):
        parts = np.split(g, splits, axis=axis)
        return tuple(p if t.requires_grad else None for p, t in zip(parts, tensors))

    return _result(data, tuple(tensors), bw)


def slice_(a: Tensor, key) -> Tensor:
    """Basic slicing (ints and slices only, so regions never overlap).

    Integer-array indexing must go through :func:`gather_rows`, whose
    backward scatter-adds duplicate rows correctly.
    """
    parts = key if isinstance(key, tuple) else (key,)
    if not all(isinstance(p, (int, np.integer, slice)) for p in parts):
        raise ParameterError("slice_ supports ints and slices only; use gather_rows for index arrays")
    data = a.data[key]

    def bw(g):
        buf = np.zeros_like(a.data)
        buf[key] += g
        return (buf,)

    return _result(data, (a,), bw)


def reshape(a: Tensor, shape) -> Tensor:
    data = a.data.reshape(shape)
    return _result(data, (a,), lambda g: (g.reshape(a.shape),))


def max_axis(a: Tensor, axis: int) -> Tensor:
    """Max over ``axis``; backward routes gradient to the first argmax."""
    idx = np.expand_dims(np.argmax(a.data, axis=axis), axis)
    data = np.take_along_axis(a.data, idx, axis=axis).squeeze(axis)

    def bw(g):
        buf = np.zeros_like(a.data)
        np.put_along_axis(buf, idx, np.expand_dims(g, axis), axis=axis)
        return (buf,)

    return _result(data, (a,), bw)


def argmax_axis(a: Tensor, axis: int) -> np.ndarray:
    return np.argmax(a.data, axis=axis)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    data = e / e.sum(axis=axis, keepdims=True)

    def bw(g):
        dot = (g * data).sum(axis=axis, keepdims=True)
        return (data * (g - dot),)

    return _result(data, (a,), bw)


def log_softmax(a: Tensor, axis: int = -1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    data = shifted - lse

    def bw(g):
        return (g - np.exp(data) * g.sum(axis=axis, keepdims=True),)

    return _result(data, (a,), bw)


def gather_rows(table: Tensor, ids) -> Tensor:
    """Embedding lookup: rows of ``table`` selected by an integer array."""
    ids = np.asarray(ids)
    if table.data.ndim != 2:
        raise ShapeError(f"gather_rows: table must be 2-D, got {table.shape}")
    data = table.data[ids]

    def bw(g):
        buf = np.zeros_like(table.data)
        np.add.at(buf, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        return (buf,)

    return _result(data, (table,), bw)


def pick(a: Tensor, ids) -> Tensor:
    """Select ``a[i, ids[i]]`` for each row; backward scatter-adds."""
    ids = np.asarray(ids)
    if a.data.ndim != 2 or ids.ndim != 1 or ids.shape[0] != a.shape[0]:
        raise ShapeError(f"pick: values {a.shape} vs ids {ids.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= a.shape[1]):
        raise ParameterError("pick: index out of range")
    rows = np.arange(a.shape[0])
    data = a.data[rows, ids]

    def bw(g):
        buf = np.zeros_like(a.data)
        np.add.at(buf, (rows, ids), g)
        return (buf,)

    return _result(data, (a,), bw)


def sum_all(a: Tensor) -> Tensor:
    data = np.asarray(a.data.sum(), dtype=a.data.dtype)
    return _result(data, (a,), lambda g: (np.broadcast_to(g, a.shape).astype(a.data.dtype, copy=False),))


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size
    data = np.asarray(a.data.mean(), dtype=a.data.dtype)
    return _result(data, (a,), lambda g: (np.broadcast_to(g / n, a.shape).astype(a.data.dtype, copy=False),))


def _topo_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents or ():
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> None:
    """Reverse-mode pass from a scalar; accumulates into leaf ``grad`` slots."""
    if loss.data.size != 1:
        raise ShapeError(f"backward requires a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(_topo_order(loss)):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._parents is None:
            if node.requires_grad:
                if node.grad is None:
                    node.grad = np.zeros_like(node.data)
                node.grad += g
            continue
        for parent, pg in zip(node._parents, node._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            acc = grads.get(id(parent))
            grads[id(parent)] = pg if acc is None else acc + pg


def zero_grads(params: Iterable[Tensor]) -> None:
    for p in params:
        p.zero_grad()


class FdReport:
    """Result of a finite-difference gradient comparison."""

    def __init__(self, per_param: dict[str, float], worst_param: str, worst_index: tuple):
        self.per_param = per_param
        self.worst_param = worst_param
        self.worst_index = worst_index

    @property
    def max_rel_error(self) -> float:
        return max(self.per_param.values()) if self.per_param else 0.0

    def __repr__(self) -> str:
        return (
            f"FdReport(max_rel_error={self.max_rel_error:.3e}, "
            f"worst={self.worst_param}{self.worst_index})"
        )


def finite_difference_check(
    f: Callable[[], Tensor],
    params: Sequence[Parameter],
    step: float = 1e-5,
) -> FdReport:
    """Compare analytic gradients of the scalar ``f()`` against central
    differences, entry by entry, in double precision.

    Relative error uses ``|a - n| / max(|a|, |n|, 1e-6)`` so exactly-zero
    gradients compare cleanly.
    """
    if not (1e-7 <= step <= 1e-3):
        raise ParameterError(f"step {step} outside [1e-7, 1e-3]")
    for p in params:
        if p.data.dtype != np.float64:
            raise ParameterError(f"finite_difference_check requires float64, {p.name} is {p.data.dtype}")
    zero_grads(params)
    backward(f())
    analytic = {p.name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data)) for p in params}

    per_param: dict[str, float] = {}
    worst_param, worst_index, worst = "", (), -1.0
    for p in params:
        worst_here = 0.0
        flat = p.data.reshape(-1)
        a_flat = analytic[p.name].reshape(-1)
        for i in range(flat.size):
            x0 = flat[i]
            flat[i] = x0 + step
            f_plus = float(f().data)
            flat[i] = x0 - step
            f_minus = float(f().data)
            flat[i] = x0
            numeric = (f_plus - f_minus) / (2.0 * step)
            a = a_flat[i]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
            if rel > worst_here:
                worst_here = rel
            if rel > worst:
                worst = rel
                worst_param = p.name
                worst_index = np.unravel_index(i, p.shape)
        per_param[p.name] = worst_here
    return FdReport(per_param, worst_param, worst_index)
