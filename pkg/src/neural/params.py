"""
Parameter-tree utilities: copying, flattening, arithmetic and gradients.
"""

from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from .tensor import Tensor, backward
from ..utils.errors import NonFiniteError, ShapeError

ParamTree = Dict[str, np.ndarray]


def copy_tree(params: Mapping[str, np.ndarray]) -> ParamTree:
    return {name: np.array(value, dtype=np.float64, copy=True) for name, value in params.items()}


def zeros_like_tree(params: Mapping[str, np.ndarray]) -> ParamTree:
    return {name: np.zeros_like(value) for name, value in params.items()}


def check_same_structure(a: Mapping[str, np.ndarray], b: Mapping[str, np.ndarray]) -> None:
    """Raise ShapeError unless both trees have identical names and shapes."""
    if set(a) != set(b):
        missing = sorted(set(a) ^ set(b))
        raise ShapeError(f"Parameter trees differ in entries: {missing[:5]}")
    for name in a:
        if np.shape(a[name]) != np.shape(b[name]):
            raise ShapeError(
                f"Shape mismatch for {name}: {np.shape(a[name])} vs {np.shape(b[name])}"
            )


def count_parameters(params: Mapping[str, np.ndarray]) -> int:
    return int(sum(np.size(v) for v in params.values()))


def flatten(params: Mapping[str, np.ndarray]) -> np.ndarray:
    """Concatenate all entries in sorted-name order into one vector."""
    if not params:
        return np.zeros(0)
    return np.concatenate([np.ravel(params[name]) for name in sorted(params)])


def unflatten(vector: np.ndarray, like: Mapping[str, np.ndarray]) -> ParamTree:
    """Inverse of ``flatten`` using ``like`` for names and shapes."""
    total = count_parameters(like)
    if vector.size != total:
        raise ShapeError(f"Vector of size {vector.size} cannot fill {total} parameters")
    out: ParamTree = {}
    offset = 0
    for name in sorted(like):
        shape = np.shape(like[name])
        size = int(np.prod(shape)) if shape else 1
        out[name] = vector[offset:offset + size].reshape(shape).copy()
        offset += size
    return out


def tree_sq_distance(a: Mapping[str, np.ndarray], b: Mapping[str, np.ndarray]) -> float:
    check_same_structure(a, b)
    return float(sum(np.sum((a[n] - b[n]) ** 2) for n in a))


def global_norm(tree: Mapping[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(np.sum(np.square(v)) for v in tree.values())))


def all_finite(tree: Mapping[str, np.ndarray]) -> bool:
    return all(np.all(np.isfinite(v)) for v in tree.values())


def assert_finite(tree: Mapping[str, np.ndarray], context: str = 'parameters') -> None:
    for name, value in tree.items():
        if not np.all(np.isfinite(value)):
            raise NonFiniteError(f"Non-finite values in {context} entry {name}")


def to_tensors(params: Mapping[str, np.ndarray], requires_grad: bool = True) -> Dict[str, Tensor]:
    """Wrap each entry as a named leaf tensor."""
    return {
        name: Tensor(value, requires_grad=requires_grad, name=name)
        for name, value in params.items()
    }


def value_and_grad(loss_fn: Callable[[Dict[str, Tensor]], Tensor],
                   params: Mapping[str, np.ndarray],
                   frozen: Optional[Mapping[str, np.ndarray]] = None
                   ) -> Tuple[float, ParamTree]:
    """
    Evaluate a loss and its gradient with respect to every parameter.

    Args:
        loss_fn: Builds a scalar loss from a tensor tree
        params: Trainable parameters
        frozen: Extra entries passed to ``loss_fn`` without gradients

    Returns:
        (loss value, gradient tree with the same structure as ``params``);
        parameters the loss does not depend on get zero gradients
    """
    tensors = to_tensors(params)
    if frozen:
        tensors.update(to_tensors(frozen, requires_grad=False))
    loss = loss_fn(tensors)
    grads = backward(loss)
    full = {name: grads.get(name, np.zeros_like(value)) for name, value in params.items()}
    return loss.item(), full
