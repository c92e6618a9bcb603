"""
Networks, weight files and the weights-directory inventory
"""

from .channel import EmbedResult, ExtractResult, GanChannel
from .manager import ModelManager
from .networks import (
    ARCHITECTURES,
    DEFAULT_HIDDEN_DIMS,
    DEFAULT_LEAKY_ALPHA,
    NetworkParams,
    Stage,
    StegoPair,
    critic_forward,
    decoder_forward,
    encoder_forward,
    init_params,
    parameter_shapes,
    stage_plan,
)
from .weights import FORMAT_VERSION, MAGIC, WEIGHT_SUFFIX, WeightHeader, load_params, read_header, save_params

__all__ = [
    'ARCHITECTURES', 'DEFAULT_HIDDEN_DIMS', 'DEFAULT_LEAKY_ALPHA', 'FORMAT_VERSION', 'MAGIC', 'WEIGHT_SUFFIX',
    'EmbedResult', 'ExtractResult', 'GanChannel', 'ModelManager', 'NetworkParams', 'Stage', 'StegoPair', 'WeightHeader',
    'critic_forward', 'decoder_forward', 'encoder_forward', 'init_params', 'load_params',
    'parameter_shapes', 'read_header', 'save_params', 'stage_plan',
]
