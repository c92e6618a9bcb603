"""
Clipped gradient updates (Adam or plain gradient descent)
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Optional, Tuple

import numpy as np

from ..errors import StateError, ValidationError
from .tensor import Gradients

if TYPE_CHECKING:
    from ..models.networks import NetworkParams

METHODS = ("adam", "sgd")


@dataclass
class OptimizerState:
    """Moment estimates and settings for one network's parameters"""

    lr: float
    clip: Tuple[float, float] = (-0.1, 0.1)
    method: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    # largest |clipped gradient| applied by the latest update
    last_applied_max: float = 0.0

    def __post_init__(self):
        lo, hi = self.clip
        if not lo < hi:
            raise ValidationError(f"Clip bounds must satisfy lo < hi, got ({lo}, {hi})")
        self.clip = (float(lo), float(hi))
        if self.method not in METHODS:
            raise ValidationError(f"Unknown optimizer '{self.method}', choose from {', '.join(METHODS)}")
        if self.lr < 0:
            raise ValidationError(f"Learning rate must be non-negative, got {self.lr}")

    def state_arrays(self) -> Dict[str, np.ndarray]:
        """Flat name -> array mapping used by checkpoints"""
        arrays = {"__step__": np.array([self.step], dtype=np.int64)}
        for name, value in self.first_moment.items():
            arrays[f"m/{name}"] = value
        for name, value in self.second_moment.items():
            arrays[f"v/{name}"] = value
        return arrays

    def restore_arrays(self, arrays: Dict[str, np.ndarray]) -> None:
        self.step = int(arrays["__step__"][0])
        self.first_moment = {k[2:]: np.array(v) for k, v in arrays.items() if k.startswith("m/")}
        self.second_moment = {k[2:]: np.array(v) for k, v in arrays.items() if k.startswith("v/")}


def apply_update(
    params: "NetworkParams",
    grads: Gradients,
    opt: OptimizerState,
    lr: Optional[float] = None,
) -> "NetworkParams":
    """Clamp every gradient to ``opt.clip`` and take one descent step.

    ``lr`` overrides ``opt.lr`` for this call only, which lets one moment
    store serve the different learning rates of a training step.
    """
    rate = opt.lr if lr is None else lr
    trainable = params.trainable()

    missing = [name for name, tensor in trainable.items() if tensor not in grads]
    if missing:
        raise StateError(f"No gradient for parameter '{missing[0]}' of the {params.arch}")

    lo, hi = opt.clip
    opt.step += 1
    applied_max = 0.0
    for name, tensor in trainable.items():
        grad = np.clip(grads[tensor], lo, hi)
        if grad.shape != tensor.shape:
            raise StateError(f"Gradient for '{name}' has shape {grad.shape}, parameter has {tensor.shape}")
        if grad.size:
            applied_max = max(applied_max, float(np.max(np.abs(grad))))

        if opt.method == "sgd":
            delta = rate * grad
        else:
            m = opt.first_moment.get(name)
            v = opt.second_moment.get(name)
            if m is None:
                m = np.zeros_like(tensor.data)
                v = np.zeros_like(tensor.data)
            m = opt.beta1 * m + (1.0 - opt.beta1) * grad
            v = opt.beta2 * v + (1.0 - opt.beta2) * grad * grad
            opt.first_moment[name] = m.astype(tensor.dtype, copy=False)
            opt.second_moment[name] = v.astype(tensor.dtype, copy=False)
            m_hat = m / (1.0 - opt.beta1 ** opt.step)
            v_hat = v / (1.0 - opt.beta2 ** opt.step)
            delta = rate * m_hat / (np.sqrt(v_hat) + opt.eps)

        tensor.data -= delta.astype(tensor.dtype, copy=False)

    opt.last_applied_max = applied_max
    return params
