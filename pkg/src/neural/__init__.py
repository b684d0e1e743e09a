"""
Differentiable numpy substrate shared by the policy and the episode encoder.
Provides tensors with reverse-mode gradients, dense and GRU layers, Adam,
and binary parameter blobs.
"""

from . import ops
from .tensor import Tensor, backward, as_tensor
from .recurrent import gru_sequence, gru_hidden_states
from .layers import (
    ParamTree,
    dense_forward,
    gru_forward,
    mlp_forward,
    init_dense,
    init_mlp,
    init_gru,
    orthogonal,
    sub_tree,
)
from .params import (
    copy_tree,
    zeros_like_tree,
    check_same_structure,
    count_parameters,
    flatten,
    unflatten,
    tree_sq_distance,
    global_norm,
    all_finite,
    assert_finite,
    to_tensors,
    value_and_grad,
)
from .optim import (
    OptimizerState,
    init_optimizer,
    adam_step,
    reset,
    clip_by_global_norm,
    DEFAULT_CLIP_NORM,
)
from .serialize import save_params, load_params, load_metadata, params_to_bytes, params_from_bytes
from .gradcheck import numeric_gradient, max_relative_error

__all__ = [
    # Autodiff
    'ops',
    'Tensor',
    'backward',
    'as_tensor',
    'gru_sequence',
    'gru_hidden_states',

    # Layers
    'ParamTree',
    'dense_forward',
    'gru_forward',
    'mlp_forward',
    'init_dense',
    'init_mlp',
    'init_gru',
    'orthogonal',
    'sub_tree',

    # Trees
    'copy_tree',
    'zeros_like_tree',
    'check_same_structure',
    'count_parameters',
    'flatten',
    'unflatten',
    'tree_sq_distance',
    'global_norm',
    'all_finite',
    'assert_finite',
    'to_tensors',
    'value_and_grad',

    # Optimizer
    'OptimizerState',
    'init_optimizer',
    'adam_step',
    'reset',
    'clip_by_global_norm',
    'DEFAULT_CLIP_NORM',

    # Serialization
    'save_params',
    'load_params',
    'load_metadata',
    'params_to_bytes',
    'params_from_bytes',

    # Checks
    'numeric_gradient',
    'max_relative_error',
]

__version__ = '1.0.0'
