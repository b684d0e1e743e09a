"""
Contrastive and distillation objectives on latent batches.
"""

from typing import Union

import numpy as np

from ..neural import Tensor, ops
from ..neural.tensor import as_tensor
from ..utils.errors import ConfigurationError, ShapeError

NORM_EPS = 1e-12
DEFAULT_TEMPERATURE = 0.15
DEFAULT_LAMBDA_NORM = 1.0

Batch = Union[Tensor, np.ndarray]


def contrastive_loss(z1: Batch, z2: Batch, temperature: float = DEFAULT_TEMPERATURE) -> Tensor:
    """
    Symmetric InfoNCE between two views of the same B items.

    Row ``i`` of ``z1`` and row ``i`` of ``z2`` form the positive pair; the
    other rows of the opposite view are negatives.

    Args:
        z1: (B, d) first-view embeddings
        z2: (B, d) second-view embeddings
        temperature: Softmax temperature

    Returns:
        Scalar tensor
    """
    z1, z2 = as_tensor(z1), as_tensor(z2)
    if z1.shape != z2.shape or z1.ndim != 2 or z1.shape[0] < 1:
        raise ShapeError(f"Contrastive views must be matching (B, d) batches, got {z1.shape} and {z2.shape}")
    if temperature <= 0:
        raise ConfigurationError(f"Temperature must be positive, got {temperature}")
    n1 = ops.l2_normalize_rows(z1, NORM_EPS)
    n2 = ops.l2_normalize_rows(z2, NORM_EPS)
    logits = ops.mul(ops.matmul(n1, ops.transpose(n2)), 1.0 / temperature)
    forward = -ops.mean(ops.diagonal(ops.log_softmax(logits)))
    backward = -ops.mean(ops.diagonal(ops.log_softmax(ops.transpose(logits))))
    return ops.mul(forward + backward, 0.5)


def distill_loss(student: Batch, teacher: np.ndarray, anchor_mask: np.ndarray,
                 lambda_norm: float = DEFAULT_LAMBDA_NORM) -> Tensor:
    """
    Direction and magnitude matching on anchor rows.

    ``L_dir`` is the mean over anchor rows of the squared distance between the
    unit-normalized student and teacher rows; ``L_scale`` is the mean squared
    difference of row norms.

    Args:
        student: (B, d) student embeddings of the original episodes
        teacher: (B, d) frozen-teacher embeddings of the same episodes
        anchor_mask: Boolean (B,) selecting the rows that are distilled
        lambda_norm: Weight of the magnitude term

    Returns:
        Scalar tensor; zero when no row is selected
    """
    student = as_tensor(student)
    teacher = np.asarray(teacher, dtype=np.float64)
    mask = np.asarray(anchor_mask, dtype=bool)
    if student.shape != teacher.shape or mask.shape != (student.shape[0],):
        raise ShapeError(f"Distillation batch mismatch: {student.shape}, {teacher.shape}, mask {mask.shape}")
    rows = np.flatnonzero(mask)
    if rows.size == 0:
        return Tensor(np.array(0.0))

    s = ops.index_rows(student, rows)
    t = teacher[rows]
    t_norms = np.sqrt((t * t).sum(axis=1))
    t_dir = t / (t_norms[:, None] + NORM_EPS)

    direction = ops.mean(ops.sum(ops.square(ops.l2_normalize_rows(s, NORM_EPS) - t_dir), axis=1))
    scale = ops.mean(ops.square(ops.row_norms(s) - t_norms))
    return direction + ops.mul(scale, float(lambda_norm))
