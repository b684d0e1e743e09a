"""
Differentiable operations used by the policy, value and encoder networks.
Each op computes its forward value with numpy and registers a closure that
returns the gradient for every input.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .tensor import Tensor, as_tensor, make_node
from ..utils.errors import ShapeError

Operand = Union[Tensor, float, np.ndarray]

NORM_EPS = 1e-12


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------- arithmetic

def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return make_node(a.value + b.value, (a, b),
                     lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return make_node(a.value - b.value, (a, b),
                     lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return make_node(a.value * b.value, (a, b),
                     lambda g: (_unbroadcast(g * b.value, a.shape),
                                _unbroadcast(g * a.value, b.shape)))


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.value / b.value
    return make_node(out, (a, b),
                     lambda g: (_unbroadcast(g / b.value, a.shape),
                                _unbroadcast(-g * out / b.value, b.shape)))


def neg(a: Tensor) -> Tensor:
    return make_node(-a.value, (a,), lambda g: (-g,))


def matmul(a: Tensor, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shapes {a.shape} and {b.shape} do not align")
    return make_node(a.value @ b.value, (a, b),
                     lambda g: (g @ b.value.T, a.value.T @ g))


def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """
    Affine layer ``y = x W^T + b`` applied per row.

    Args:
        x: Inputs of shape (N, in)
        weight: Matrix of shape (out, in)
        bias: Vector of shape (out,)

    Returns:
        Tensor of shape (N, out)
    """
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[1]:
        raise ShapeError(
            f"dense input {x.shape} does not match weight {weight.shape}"
        )
    if bias.shape != (weight.shape[0],):
        raise ShapeError(f"dense bias {bias.shape} does not match weight {weight.shape}")
    out = x.value @ weight.value.T + bias.value

    def grad_fn(g):
        return g @ weight.value, g.T @ x.value, g.sum(axis=0)

    return make_node(out, (x, weight, bias), grad_fn)


# ---------------------------------------------------------- elementwise maps

def relu(x: Tensor) -> Tensor:
    mask = x.value > 0
    return make_node(np.where(mask, x.value, 0.0), (x,), lambda g: (g * mask,))


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.value)
    return make_node(out, (x,), lambda g: (g * (1.0 - out * out),))


def sigmoid(x: Tensor) -> Tensor:
    out = 1.0 / (1.0 + np.exp(-x.value))
    return make_node(out, (x,), lambda g: (g * out * (1.0 - out),))


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.value)
    return make_node(out, (x,), lambda g: (g * out,))


def log(x: Tensor) -> Tensor:
    return make_node(np.log(x.value), (x,), lambda g: (g / x.value,))


def square(x: Tensor) -> Tensor:
    return make_node(x.value * x.value, (x,), lambda g: (2.0 * g * x.value,))


def sqrt(x: Tensor) -> Tensor:
    out = np.sqrt(x.value)
    return make_node(out, (x,), lambda g: (g / (2.0 * out),))


def clip(x: Tensor, low: float, high: float) -> Tensor:
    """Clamp values; the gradient is zero where the bound is active."""
    inside = (x.value >= low) & (x.value <= high)
    return make_node(np.clip(x.value, low, high), (x,), lambda g: (g * inside,))


def minimum(a: Operand, b: Operand) -> Tensor:
    """Elementwise minimum; ties route the gradient to ``a``."""
    a, b = as_tensor(a), as_tensor(b)
    pick_a = a.value <= b.value
    return make_node(np.minimum(a.value, b.value), (a, b),
                     lambda g: (_unbroadcast(g * pick_a, a.shape),
                                _unbroadcast(g * ~pick_a, b.shape)))


# ---------------------------------------------------------------- reductions

def sum(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # pylint: disable=redefined-builtin
    out = x.value.sum(axis=axis, keepdims=keepdims)

    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return make_node(out, (x,), grad_fn)


def mean(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    count = x.value.size if axis is None else x.shape[axis]
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


# ------------------------------------------------------------------- shaping

def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return make_node(x.value.reshape(shape), (x,), lambda g: (g.reshape(x.shape),))


def transpose(x: Tensor) -> Tensor:
    return make_node(x.value.T, (x,), lambda g: (g.T,))


def index_rows(x: Tensor, rows: np.ndarray) -> Tensor:
    """Gather rows (with repetition) from a 2-D tensor."""
    rows = np.asarray(rows, dtype=np.int64)

    def grad_fn(g):
        full = np.zeros_like(x.value)
        np.add.at(full, rows, g)
        return (full,)

    return make_node(x.value[rows], (x,), grad_fn)


def pick(x: Tensor, index: np.ndarray) -> Tensor:
    """Select ``x[i, index[i]]`` for every row ``i``."""
    index = np.asarray(index, dtype=np.int64)
    rows = np.arange(x.shape[0])

    def grad_fn(g):
        full = np.zeros_like(x.value)
        full[rows, index] = g
        return (full,)

    return make_node(x.value[rows, index], (x,), grad_fn)


def diagonal(x: Tensor) -> Tensor:
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ShapeError(f"diagonal needs a square matrix, got {x.shape}")

    def grad_fn(g):
        return (np.diag(g),)

    return make_node(np.diagonal(x.value).copy(), (x,), grad_fn)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def grad_fn(g):
        return tuple(np.split(g, splits, axis=axis))

    return make_node(np.concatenate([t.value for t in tensors], axis=axis), tensors, grad_fn)


# ------------------------------------------------------------ normalizations

def log_softmax(x: Tensor) -> Tensor:
    """Row-wise log-softmax over the last axis."""
    shifted = x.value - x.value.max(axis=-1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    probs = np.exp(out)

    def grad_fn(g):
        return (g - probs * g.sum(axis=-1, keepdims=True),)

    return make_node(out, (x,), grad_fn)


def softmax(x: Tensor) -> Tensor:
    return exp(log_softmax(x))


def row_norms(x: Tensor) -> Tensor:
    """Euclidean norm of every row of a 2-D tensor."""
    norms = np.sqrt((x.value * x.value).sum(axis=1))
    safe = np.where(norms > 0, norms, 1.0)

    def grad_fn(g):
        return ((g / safe)[:, None] * x.value,)

    return make_node(norms, (x,), grad_fn)


def l2_normalize_rows(x: Tensor, eps: float = NORM_EPS) -> Tensor:
    """Scale every row to unit length, ``x / (||x|| + eps)``."""
    norms = np.sqrt((x.value * x.value).sum(axis=1, keepdims=True))
    denom = norms + eps
    safe = np.where(norms > 0, norms, 1.0)
    out = x.value / denom

    def grad_fn(g):
        dot = (g * x.value).sum(axis=1, keepdims=True)
        return (g / denom - x.value * dot / (denom * denom * safe),)

    return make_node(out, (x,), grad_fn)
