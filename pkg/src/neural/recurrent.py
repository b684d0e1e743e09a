"""
Gated recurrent unit over padded batches.

The recurrence uses gate order (reset, update, candidate) in the stacked
weight matrices:

    r  = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
    z  = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
    n  = tanh(W_in x + b_in + r * (W_hn h + b_hn))
    h' = (1 - z) * n + z * h

Rows whose valid length has been reached carry their hidden state forward
unchanged, so padding never influences the result.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from .tensor import Tensor, as_tensor, make_node
from ..utils.errors import EmptyEpisodeError, ShapeError

logger = logging.getLogger(__name__)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _check_inputs(inputs: np.ndarray, lengths: np.ndarray, w_ih: np.ndarray,
                  w_hh: np.ndarray, b_ih: np.ndarray, b_hh: np.ndarray) -> int:
    if inputs.ndim != 3:
        raise ShapeError(f"GRU inputs must be (batch, time, features), got {inputs.shape}")
    hidden = w_hh.shape[1]
    if w_hh.shape != (3 * hidden, hidden):
        raise ShapeError(f"GRU W_hh has shape {w_hh.shape}, expected {(3 * hidden, hidden)}")
    if w_ih.shape != (3 * hidden, inputs.shape[2]):
        raise ShapeError(
            f"GRU W_ih has shape {w_ih.shape}, expected {(3 * hidden, inputs.shape[2])}"
        )
    if b_ih.shape != (3 * hidden,) or b_hh.shape != (3 * hidden,):
        raise ShapeError("GRU bias shapes do not match hidden size")
    if lengths.shape != (inputs.shape[0],):
        raise ShapeError(f"lengths shape {lengths.shape} does not match batch {inputs.shape[0]}")
    if lengths.size and lengths.min() < 1:
        raise EmptyEpisodeError("GRU received a sequence with valid length 0")
    if lengths.size and lengths.max() > inputs.shape[1]:
        raise ShapeError("A valid length exceeds the padded sequence length")
    return hidden


def gru_sequence(inputs: Tensor,
                 lengths: np.ndarray,
                 w_ih: Tensor,
                 w_hh: Tensor,
                 b_ih: Tensor,
                 b_hh: Tensor) -> Tensor:
    """
    Run the GRU over padded sequences and return the final hidden states.

    Args:
        inputs: Tensor of shape (B, T, I)
        lengths: Valid length of every row, each in [1, T]
        w_ih: Input weights (3H, I)
        w_hh: Recurrent weights (3H, H)
        b_ih: Input bias (3H,)
        b_hh: Recurrent bias (3H,)

    Returns:
        Tensor of shape (B, H) holding h at each row's last valid step

    Raises:
        EmptyEpisodeError: If any row has valid length 0
    """
    inputs, w_ih, w_hh = as_tensor(inputs), as_tensor(w_ih), as_tensor(w_hh)
    b_ih, b_hh = as_tensor(b_ih), as_tensor(b_hh)
    lengths = np.asarray(lengths, dtype=np.int64)
    hidden = _check_inputs(inputs.value, lengths, w_ih.value, w_hh.value,
                           b_ih.value, b_hh.value)

    x = inputs.value
    batch, _, n_in = x.shape
    steps = int(lengths.max()) if batch else 0
    gates_in = x[:, :steps] @ w_ih.value.T + b_ih.value

    h = np.zeros((batch, hidden))
    cache = []
    for t in range(steps):
        gh = h @ w_hh.value.T + b_hh.value
        gi = gates_in[:, t]
        r = _sigmoid(gi[:, :hidden] + gh[:, :hidden])
        z = _sigmoid(gi[:, hidden:2 * hidden] + gh[:, hidden:2 * hidden])
        gh_n = gh[:, 2 * hidden:]
        n = np.tanh(gi[:, 2 * hidden:] + r * gh_n)
        active = (t < lengths)[:, None]
        cache.append((h, r, z, n, gh_n, active))
        h = np.where(active, (1.0 - z) * n + z * h, h)

    def grad_fn(g):
        dh = g.copy()
        d_gates_in = np.zeros((batch, x.shape[1], 3 * hidden))
        d_w_hh = np.zeros_like(w_hh.value)
        d_b_hh = np.zeros_like(b_hh.value)
        for t in range(steps - 1, -1, -1):
            h_prev, r, z, n, gh_n, active = cache[t]
            dh_step = dh * active
            dn = dh_step * (1.0 - z)
            dz = dh_step * (h_prev - n)
            dn_pre = dn * (1.0 - n * n)
            dr_pre = dn_pre * gh_n * r * (1.0 - r)
            dz_pre = dz * z * (1.0 - z)
            d_gates_in[:, t] = np.concatenate([dr_pre, dz_pre, dn_pre], axis=1)
            d_gh = np.concatenate([dr_pre, dz_pre, dn_pre * r], axis=1)
            d_w_hh += d_gh.T @ h_prev
            d_b_hh += d_gh.sum(axis=0)
            dh = dh * ~active + dh_step * z + d_gh @ w_hh.value
        flat = d_gates_in.reshape(-1, 3 * hidden)
        d_w_ih = flat.T @ x.reshape(-1, n_in)
        d_b_ih = flat.sum(axis=0)
        d_x = d_gates_in @ w_ih.value
        return d_x, None, d_w_ih, d_w_hh, d_b_ih, d_b_hh

    lengths_tensor = Tensor(lengths.astype(np.float64))
    return make_node(h, (inputs, lengths_tensor, w_ih, w_hh, b_ih, b_hh), grad_fn)


def gru_hidden_states(inputs: np.ndarray,
                      lengths: np.ndarray,
                      params: Dict[str, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Forward-only GRU returning every hidden state.

    Args:
        inputs: Array of shape (B, T, I)
        lengths: Valid lengths per row
        params: Mapping with keys ``W_ih``, ``W_hh``, ``b_ih``, ``b_hh``

    Returns:
        (states of shape (B, T, H), final states of shape (B, H)); states past
        a row's valid length repeat its final state
    """
    x = np.asarray(inputs, dtype=np.float64)
    lengths = np.asarray(lengths, dtype=np.int64)
    w_ih, w_hh = params['W_ih'], params['W_hh']
    b_ih, b_hh = params['b_ih'], params['b_hh']
    hidden = _check_inputs(x, lengths, w_ih, w_hh, b_ih, b_hh)

    batch, total, _ = x.shape
    states = np.zeros((batch, total, hidden))
    h = np.zeros((batch, hidden))
    gates_in = x @ w_ih.T + b_ih
    for t in range(total):
        gh = h @ w_hh.T + b_hh
        gi = gates_in[:, t]
        r = _sigmoid(gi[:, :hidden] + gh[:, :hidden])
        z = _sigmoid(gi[:, hidden:2 * hidden] + gh[:, hidden:2 * hidden])
        n = np.tanh(gi[:, 2 * hidden:] + r * gh[:, 2 * hidden:])
        active = (t < lengths)[:, None]
        h = np.where(active, (1.0 - z) * n + z * h, h)
        states[:, t] = h
    return states, h
