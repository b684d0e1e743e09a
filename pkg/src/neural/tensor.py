"""
Reverse-mode automatic differentiation over numpy arrays.

A Tensor wraps a float64 array together with the parents it was computed
from and a closure mapping the output gradient to parent gradients. Calling
``backward`` on a scalar tensor walks the recorded graph in reverse
topological order and accumulates gradients on every tensor that requires
them.
"""

import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import ShapeError

logger = logging.getLogger(__name__)

GradFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """
    A node in the computation graph.

    Leaves created with ``requires_grad=True`` (usually parameters) receive a
    ``grad`` array after ``backward``. Intermediate nodes keep references to
    their parents only when at least one parent requires a gradient.
    """

    __array_priority__ = 1000

    __slots__ = ('value', 'grad', 'requires_grad', 'name', '_parents', '_grad_fn')

    def __init__(self,
                 value,
                 requires_grad: bool = False,
                 name: Optional[str] = None,
                 parents: Tuple['Tensor', ...] = (),
                 grad_fn: Optional[GradFn] = None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents = parents
        self._grad_fn = grad_fn

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    def numpy(self) -> np.ndarray:
        return self.value

    def item(self) -> float:
        if self.value.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.value.reshape(()))

    def zero_grad(self):
        self.grad = None

    def backward(self) -> None:
        backward(self)

    # Operator sugar; the functions live in ops to keep one implementation.
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import ops
        return ops.div(self, other)

    def __neg__(self):
        from . import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ''
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"


def as_tensor(value) -> Tensor:
    """Wrap constants; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def make_node(value: np.ndarray, parents: Iterable[Tensor], grad_fn: GradFn) -> Tensor:
    """
    Create an op output, recording the graph only if a parent needs it.

    Args:
        value: Forward result
        parents: Input tensors in the order ``grad_fn`` returns gradients
        grad_fn: Maps the output gradient to one gradient (or None) per parent

    Returns:
        New Tensor
    """
    parents = tuple(parents)
    if any(p.requires_grad for p in parents):
        return Tensor(value, requires_grad=True, parents=parents, grad_fn=grad_fn)
    return Tensor(value)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> Dict[str, np.ndarray]:
    """
    Run reverse-mode differentiation from a scalar loss.

    Gradients are accumulated into ``.grad`` of every leaf that requires
    them. Leaves carrying a ``name`` are also returned in a gradient tree.

    Args:
        loss: Scalar tensor

    Returns:
        Mapping from leaf name to gradient array

    Raises:
        ShapeError: If the loss is not a scalar
    """
    if loss.value.size != 1:
        raise ShapeError(f"backward() needs a scalar loss, got shape {loss.shape}")

    grads: Dict[str, np.ndarray] = {}
    if not loss.requires_grad:
        return grads

    order = _topological_order(loss)
    pending: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.value)}

    for node in reversed(order):
        g = pending.pop(id(node), None)
        if g is None:
            continue
        if node._grad_fn is None:
            node.grad = g if node.grad is None else node.grad + g
            if node.name is not None:
                grads[node.name] = node.grad
            continue
        parent_grads = node._grad_fn(g)
        for parent, pg in zip(node._parents, parent_grads):
            if pg is None or not parent.requires_grad:
                continue
            if pg.shape != parent.shape:
                raise ShapeError(
                    f"Gradient shape {pg.shape} does not match input shape {parent.shape}"
                )
            key = id(parent)
            pending[key] = pg if key not in pending else pending[key] + pg

    return grads
