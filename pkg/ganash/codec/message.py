"""
Packing message bits into H x W x D tensors and recovering them again

Layout (shared by encode and decode, do not change without a format bump):
the sequence ``[32-bit big-endian payload bit count || payload bits]`` is
written row-major over (H, W, D) and repeated cyclically until the volume
is full. Decoding thresholds every element, finds the period from the
header and takes a per-bit majority vote over the repetitions.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..engine import Tensor, Tensor4
from ..errors import CapacityError, DecodeError, DimensionError, ValidationError
from .reed_solomon import BitMessage

HEADER_BITS = 32

Bits = Union[BitMessage, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class MessageTensorSpec:
    height: int
    width: int
    depth: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValidationError(f"Message volume needs H, W >= 1, got {self.height}x{self.width}")
        if self.depth < 1:
            raise ValidationError(f"Data depth must be at least 1, got {self.depth}")

    @property
    def capacity(self) -> int:
        return self.height * self.width * self.depth

    @property
    def shape(self):
        return (1, self.height, self.width, self.depth)


def _bits_of(msg: Bits) -> np.ndarray:
    if isinstance(msg, BitMessage):
        return msg.bits
    return BitMessage(np.asarray(msg)).bits


def header_bits(bit_count: int) -> np.ndarray:
    if not 0 <= bit_count < 2 ** HEADER_BITS:
        raise CapacityError(bit_count, 2 ** HEADER_BITS - 1)
    return np.unpackbits(np.array([bit_count], dtype=">u4").view(np.uint8))


def _bits_to_int(bits: np.ndarray) -> int:
    return int(np.packbits(bits.astype(np.uint8)).view(">u4")[0])


def pack_message(msg: Bits, spec: MessageTensorSpec, header: bool = True) -> Tensor4:
    """Lay out ``msg`` (with its length header unless ``header`` is False) over a 1 x H x W x D tensor"""
    bits = _bits_of(msg)
    sequence = np.concatenate([header_bits(bits.size), bits]) if header else bits
    if sequence.size == 0:
        raise ValidationError("Nothing to pack: message has no bits")
    if sequence.size > spec.capacity:
        raise CapacityError(int(sequence.size), spec.capacity)
    filled = np.resize(sequence, spec.capacity).astype(np.float32)
    return Tensor4(filled.reshape(spec.shape))


def _vote(hard: np.ndarray, soft: np.ndarray, period: int) -> np.ndarray:
    """Per-position majority over every repetition of ``period``; ties go to the summed soft values"""
    total_len = hard.size
    reps = -(-total_len // period)
    pad = reps * period - total_len
    valid = np.concatenate([np.ones(total_len), np.zeros(pad)]).reshape(reps, period)
    ones = (np.concatenate([hard, np.zeros(pad)]).reshape(reps, period) * valid).sum(axis=0)
    soft_sum = (np.concatenate([soft, np.zeros(pad)]).reshape(reps, period) * valid).sum(axis=0)
    copies = valid.sum(axis=0)
    majority = np.where(2 * ones > copies, 1, 0)
    return np.where(2 * ones == copies, soft_sum >= 0, majority).astype(np.uint8)


def _header_vote(hard: np.ndarray, soft: np.ndarray, period: int) -> int:
    """Length value voted over every complete header window of ``period``"""
    starts = np.arange(0, hard.size - HEADER_BITS + 1, period)
    windows = starts[:, None] + np.arange(HEADER_BITS)
    ones = hard[windows].sum(axis=0)
    soft_sum = soft[windows].sum(axis=0)
    bits = np.where(2 * ones == starts.size, soft_sum >= 0, 2 * ones > starts.size)
    return _bits_to_int(bits)


def _near(value: int, max_len: int) -> List[int]:
    """In-range lengths within two bit flips of ``value``, closest first"""
    flips = [0] + [1 << i for i in range(HEADER_BITS)]
    flips += [(1 << i) | (1 << j) for i, j in combinations(range(HEADER_BITS), 2)]
    return [value ^ flip for flip in flips if 0 < value ^ flip <= max_len]


def _resolve_length(hard: np.ndarray, soft: np.ndarray) -> int:
    capacity = hard.size
    max_len = capacity - HEADER_BITS
    if max_len <= 0:
        raise DecodeError(f"Carrier of {capacity} bits cannot hold a {HEADER_BITS}-bit length header")

    weights = (2 ** np.arange(HEADER_BITS - 1, -1, -1)).astype(np.int64)
    values = sliding_window_view(hard.astype(np.int64), HEADER_BITS) @ weights

    # copy k of a length-L message starts at k * (32 + L) and reads L
    offsets = np.arange(values.size)
    aligned = (values > 0) & (values <= max_len)
    aligned &= offsets % (values + HEADER_BITS) == 0
    lengths, support = np.unique(values[aligned], return_counts=True)
    near = _near(int(values[0]), max_len)
    candidates = near[:1] if near and near[0] == values[0] else []
    candidates += [int(length) for length in lengths[np.argsort(-support, kind="stable")]]
    # every copy may be damaged; copy 0 still sits at offset 0
    candidates += near

    for length in dict.fromkeys(candidates):
        if _header_vote(hard, soft, HEADER_BITS + length) == length:
            return length
    raise DecodeError("Length header is inconsistent across the message repetitions")


def unpack_message(
    tensor: Union[Tensor, np.ndarray],
    spec: MessageTensorSpec,
    header: bool = True,
    from_logits: bool = True,
    bit_count: Optional[int] = None,
) -> BitMessage:
    """Threshold a 1 x H x W x D tensor and majority-vote the repetitions back into a message.

    With ``from_logits`` an element decodes to 1 when its logit is >= 0
    (sigmoid >= 0.5); otherwise values are probabilities/bits thresholded
    at 0.5. Without a header, ``bit_count`` (default: full capacity) fixes
    the period.
    """
    data = tensor.data if isinstance(tensor, Tensor) else np.asarray(tensor)
    if data.shape != spec.shape:
        raise DimensionError(f"Expected a message tensor of shape {spec.shape}, got {data.shape}")
    flat = data.reshape(-1).astype(np.float64)
    soft = flat if from_logits else flat - 0.5
    hard = (soft >= 0).astype(np.uint8)

    if not header:
        count = spec.capacity if bit_count is None else bit_count
        if not 0 < count <= spec.capacity:
            raise CapacityError(count, spec.capacity)
        return BitMessage(_vote(hard, soft, count))

    length = _resolve_length(hard, soft)
    voted = _vote(hard, soft, HEADER_BITS + length)
    return BitMessage(voted[HEADER_BITS:])
