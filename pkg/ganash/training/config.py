"""
Training configuration loaded from flat YAML files
"""

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from ..errors import ValidationError

CRITIC_LOSS_MODES = ("mean_diff", "per_sample")


@dataclass
class TrainConfig:
    """Hyperparameters of one training run; defaults are the reference settings"""

    lr_critic: float = 1e-5
    lr_decoder: float = 1e-2
    lr_total: float = 1e-5
    clip: Tuple[float, float] = (-0.1, 0.1)
    hidden_dims: int = 32
    data_depth: int = 4
    kernel: int = 3
    leaky_alpha: float = 0.2
    coworkers: int = 4
    buffer: int = 8
    batch_size: int = 4
    crop_height: int = 64
    crop_width: int = 64
    steps: int = 2000
    critic_iters: int = 1
    critic_loss_mode: str = "mean_diff"
    freeze_encoder_in_critic_step: bool = False
    optimizer: str = "adam"
    seed: int = 0
    image_dir: Optional[str] = None
    checkpoint_dir: str = "checkpoints"
    checkpoint_every: int = 500
    log_every: int = 50
    loss_log: str = "losses.csv"

    def __post_init__(self):
        self.clip = tuple(float(v) for v in self.clip)
        self.validate()

    def validate(self) -> None:
        for name in ("lr_critic", "lr_decoder", "lr_total"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative, got {getattr(self, name)}")
        if len(self.clip) != 2 or not self.clip[0] < self.clip[1]:
            raise ValidationError(f"clip must be two bounds lo < hi, got {self.clip}")
        for name in ("hidden_dims", "data_depth", "coworkers", "buffer", "batch_size",
                     "crop_height", "crop_width", "critic_iters", "checkpoint_every", "log_every"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.steps < 0:
            raise ValidationError(f"steps must be non-negative, got {self.steps}")
        if self.kernel != 3:
            raise ValidationError(f"Only 3x3 hidden kernels are supported, got kernel={self.kernel}")
        if not 0.0 < self.leaky_alpha < 1.0:
            raise ValidationError(f"leaky_alpha must lie in (0, 1), got {self.leaky_alpha}")
        if self.critic_loss_mode not in CRITIC_LOSS_MODES:
            raise ValidationError(
                f"critic_loss_mode must be one of {', '.join(CRITIC_LOSS_MODES)}, got '{self.critic_loss_mode}'"
            )
        if self.optimizer not in ("adam", "sgd"):
            raise ValidationError(f"optimizer must be 'adam' or 'sgd', got '{self.optimizer}'")

    @property
    def crop(self) -> Tuple[int, int]:
        return (self.crop_height, self.crop_width)

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        known = set(cls.keys())
        for key in data:
            if key not in known:
                raise ValidationError(f"Unknown config key '{key}'")
        return cls(**data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "TrainConfig":
        """Load a flat YAML mapping whose keys are field names"""
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"Config file not found: {path}")
        with open(path, 'r') as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ValidationError(f"Config file {path} is not valid YAML: {e}") from e
        if not isinstance(data, dict):
            raise ValidationError(f"Config file {path} must hold a key: value mapping")
        return cls.from_dict(data)

    def with_overrides(self, **overrides) -> "TrainConfig":
        """Copy with every non-None override applied"""
        applied = {k: v for k, v in overrides.items() if v is not None}
        known = set(self.keys())
        for key in applied:
            if key not in known:
                raise ValidationError(f"Unknown config key '{key}'")
        return replace(self, **applied)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["clip"] = list(self.clip)
        return data

    def save(self, path: Union[str, Path]) -> None:
        with open(path, 'w') as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=False)
