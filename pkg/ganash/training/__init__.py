"""
Triplet training loop, configuration and image pipeline
"""

from .config import CRITIC_LOSS_MODES, TrainConfig
from .loader import BatchSource, LoaderStats, load_batches
from .trainer import (
    LOSS_COLUMNS,
    StepLosses,
    TrainState,
    critic_loss,
    init_state,
    load_checkpoint,
    sample_messages,
    save_checkpoint,
    train,
    triplet_step,
)

__all__ = [
    'CRITIC_LOSS_MODES', 'TrainConfig',
    'BatchSource', 'LoaderStats', 'load_batches',
    'LOSS_COLUMNS', 'StepLosses', 'TrainState', 'critic_loss', 'init_state', 'load_checkpoint',
    'sample_messages', 'save_checkpoint', 'train', 'triplet_step',
]
