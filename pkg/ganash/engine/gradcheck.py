"""
Finite-difference gradient checking
"""

from typing import Callable, Dict, Sequence

import numpy as np

from .tensor import GradientTape, Tensor


def numerical_gradient(fn: Callable[[], float], array: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central differences of ``fn`` with respect to every element of ``array`` (mutated in place, then restored)"""
    grad = np.zeros(array.shape, dtype=np.float64)
    for index in np.ndindex(array.shape):
        original = array[index]
        array[index] = original + h
        plus = fn()
        array[index] = original - h
        minus = fn()
        array[index] = original
        grad[index] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Norm-wise relative error ||a - n|| / max(||a||, ||n||)"""
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def gradcheck(loss_fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = 1e-5) -> Dict[str, float]:
    """Compare tape gradients with central differences.

    ``loss_fn`` rebuilds the scalar loss from the current tensor values; it
    is called once under a tape and twice per element without one. Returns
    the relative error per tensor (keyed by name or position).
    """
    with GradientTape() as tape:
        loss = loss_fn()
    grads = tape.backward(loss)

    def evaluate() -> float:
        return loss_fn().item()

    errors = {}
    for position, tensor in enumerate(tensors):
        analytic = grads.get(tensor, np.zeros_like(tensor.data))
        numeric = numerical_gradient(evaluate, tensor.data, h)
        errors[tensor.name or str(position)] = relative_error(np.asarray(analytic, dtype=np.float64), numeric)
    return errors
