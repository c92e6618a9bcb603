"""
Minimal NHWC tensor engine with reverse-mode gradients
"""

from .tensor import GradientTape, Gradients, Tensor, Tensor4, backward, wrap
from .ops import (
    activation,
    add,
    batch_norm,
    concat_channels,
    conv2d,
    leaky_relu,
    mse_loss,
    reduce_mean,
    reduce_sum,
    sce_loss,
    sigmoid,
    square,
    sub,
    sum_all,
    tanh,
)
from .optim import OptimizerState, apply_update
from .gradcheck import gradcheck, numerical_gradient, relative_error

__all__ = [
    'Tensor', 'Tensor4', 'GradientTape', 'Gradients', 'backward', 'wrap',
    'conv2d', 'batch_norm', 'activation', 'leaky_relu', 'tanh', 'sigmoid',
    'mse_loss', 'sce_loss', 'reduce_mean', 'reduce_sum', 'add', 'sub', 'square',
    'sum_all', 'concat_channels',
    'OptimizerState', 'apply_update',
    'gradcheck', 'numerical_gradient', 'relative_error',
]
