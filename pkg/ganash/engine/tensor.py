"""
Tensor values and the reverse-mode gradient tape
"""

import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionError, StateError

_local = threading.local()


class Tensor:
    """Numeric array with optional gradient tracking.

    Rank-4 activations use the :class:`Tensor4` subclass; parameter vectors
    and scalar losses use plain ``Tensor``.
    """

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        array = np.asarray(data)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float32)
        self.data = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._tape: Optional["GradientTape"] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        """Same values, cut off from any tape"""
        return wrap(self.data)

    def astype(self, dtype) -> "Tensor":
        return type(self)(self.data.astype(dtype), requires_grad=self.requires_grad, name=self.name)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"{type(self).__name__}(shape={self.shape}, dtype={self.dtype}{label}, requires_grad={self.requires_grad})"


class Tensor4(Tensor):
    """Rank-4 tensor laid out as (batch, height, width, channels)"""

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        super().__init__(data, requires_grad=requires_grad, name=name)
        if self.data.ndim != 4:
            raise DimensionError(f"Tensor4 needs rank 4 (B, H, W, C), got shape {self.data.shape}")

    @property
    def batch(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def channels(self) -> int:
        return self.data.shape[3]


def wrap(data, requires_grad: bool = False, name: Optional[str] = None) -> Tensor:
    """Build a Tensor4 for rank-4 data and a plain Tensor otherwise"""
    array = np.asarray(data)
    if array.ndim == 4:
        return Tensor4(array, requires_grad=requires_grad, name=name)
    return Tensor(array, requires_grad=requires_grad, name=name)


BackwardRule = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
Gradients = Dict[Tensor, np.ndarray]


@dataclass
class _Record:
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    rule: BackwardRule


class GradientTape:
    """Records differentiable operations so gradients can be replayed.

    Usage::

        with GradientTape() as tape:
            loss = mse_loss(a, b)
        grads = tape.backward(loss)

    A tape can be replayed once; a new forward pass needs a new tape.
    """

    def __init__(self):
        self.records: List[_Record] = []
        self.consumed = False

    def __enter__(self) -> "GradientTape":
        stack = getattr(_local, "tapes", None)
        if stack is None:
            stack = _local.tapes = []
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _local.tapes.remove(self)
        return False

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ops(self) -> List[str]:
        return [record.op for record in self.records]

    def record(self, op: str, inputs: Sequence[Tensor], output: Tensor, rule: BackwardRule) -> None:
        if self.consumed:
            raise StateError("Tape already consumed; open a new GradientTape for the next forward pass")
        self.records.append(_Record(op, tuple(inputs), output, rule))
        output._tape = self

    def clear(self) -> None:
        self.records.clear()

    def backward(self, loss: Tensor) -> Gradients:
        """Replay the tape in reverse and return gradients of every leaf that requires them"""
        if self.consumed:
            raise StateError("Tape already consumed; run the forward pass again before calling backward")
        if loss._tape is not self:
            raise StateError("Loss was not recorded on this tape")
        if loss.size != 1:
            raise StateError(f"backward needs a scalar loss, got shape {loss.shape}")

        pending: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        leaves: Dict[int, Tensor] = {}

        for record in reversed(self.records):
            upstream = pending.pop(id(record.output), None)
            if upstream is None:
                continue
            for tensor, grad in zip(record.inputs, record.rule(upstream)):
                if grad is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                pending[key] = pending[key] + grad if key in pending else grad
                if tensor._tape is None:
                    leaves[key] = tensor

        gradients: Gradients = {}
        for key, tensor in leaves.items():
            tensor.grad = pending[key]
            gradients[tensor] = tensor.grad

        self.consumed = True
        self.records.clear()
        return gradients


def active_tape() -> Optional[GradientTape]:
    stack = getattr(_local, "tapes", None)
    return stack[-1] if stack else None


def emit(op: str, inputs: Sequence[Tensor], data: np.ndarray, rule: BackwardRule) -> Tensor:
    """Create an operator output and record it on the active tape when needed"""
    requires_grad = any(t.requires_grad for t in inputs)
    out = wrap(data, requires_grad=requires_grad)
    tape = active_tape()
    if requires_grad and tape is not None:
        tape.record(op, inputs, out, rule)
    return out


def backward(loss: Tensor) -> Gradients:
    """Back-propagate from a scalar loss through the tape that produced it"""
    if loss._tape is None:
        raise StateError("Loss was not produced under a GradientTape; nothing to differentiate")
    return loss._tape.backward(loss)
