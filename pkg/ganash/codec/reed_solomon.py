"""
Text <-> bit conversion with Reed-Solomon error correction over GF(2^8)
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from reedsolo import ReedSolomonError, RSCodec

from ..errors import DecodeError, ValidationError

BLOCK_SIZE = 255
DEFAULT_PARITY = 32


@dataclass(eq=False)
class BitMessage:
    """Payload bits (MSB-first per byte) plus the RS framing they were coded with"""

    bits: np.ndarray
    parity_symbols: int = 0
    original_len: int = 0

    def __post_init__(self):
        bits = np.asarray(self.bits).reshape(-1)
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise ValidationError("BitMessage bits must be 0 or 1")
        self.bits = bits.astype(np.uint8)
        if not 0 <= self.parity_symbols < BLOCK_SIZE:
            raise ValidationError(f"parity_symbols must lie in [0, {BLOCK_SIZE}), got {self.parity_symbols}")

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMessage):
            return NotImplemented
        return (
            np.array_equal(self.bits, other.bits)
            and self.parity_symbols == other.parity_symbols
            and self.original_len == other.original_len
        )

    __hash__ = None

    @property
    def byte_aligned(self) -> bool:
        return self.bits.size % 8 == 0

    def to_bytes(self) -> bytes:
        if not self.byte_aligned:
            raise ValidationError(f"{self.bits.size} bits are not a whole number of bytes")
        return np.packbits(self.bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, parity_symbols: int = 0, original_len: Optional[int] = None) -> "BitMessage":
        bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        return cls(bits, parity_symbols, len(data) if original_len is None else original_len)


def _check_parity(parity_symbols: int) -> None:
    if not isinstance(parity_symbols, (int, np.integer)) or isinstance(parity_symbols, bool):
        raise ValidationError(f"parity_symbols must be an integer, got {parity_symbols!r}")
    if parity_symbols % 2 or not 2 <= parity_symbols <= BLOCK_SIZE - 1:
        raise ValidationError(f"parity_symbols must be even and within [2, {BLOCK_SIZE - 1}], got {parity_symbols}")


@lru_cache(maxsize=None)
def _codec(parity_symbols: int) -> RSCodec:
    return RSCodec(parity_symbols, nsize=BLOCK_SIZE)


def _as_bytes(text: Union[bytes, bytearray, str]) -> bytes:
    if isinstance(text, str):
        return text.encode("utf-8")
    return bytes(text)


def coded_length(payload_len: int, parity_symbols: int) -> int:
    """Number of coded bytes produced for a payload of ``payload_len`` bytes"""
    data_per_block = BLOCK_SIZE - parity_symbols
    blocks = -(-payload_len // data_per_block)
    return payload_len + blocks * parity_symbols


def text_to_bits(text: Union[bytes, str], parity_symbols: int = DEFAULT_PARITY) -> BitMessage:
    """RS-code ``text`` in blocks of at most 255 bytes and serialise MSB-first"""
    payload = _as_bytes(text)
    if not payload:
        raise ValidationError("Message text is empty")
    _check_parity(parity_symbols)

    codec = _codec(parity_symbols)
    data_per_block = BLOCK_SIZE - parity_symbols
    coded = bytearray()
    for start in range(0, len(payload), data_per_block):
        coded += codec.encode(payload[start:start + data_per_block])
    return BitMessage.from_bytes(bytes(coded), parity_symbols, len(payload))


def bits_to_text(msg: BitMessage, parity_symbols: Optional[int] = None) -> bytes:
    """Correct up to parity_symbols/2 byte errors per block and return the payload"""
    parity = msg.parity_symbols if parity_symbols is None else parity_symbols
    _check_parity(parity)
    if len(msg) == 0 or not msg.byte_aligned:
        raise ValidationError(f"Coded message needs a positive multiple of 8 bits, got {len(msg)}")

    coded = msg.to_bytes()
    codec = _codec(parity)
    payload = bytearray()
    for index, start in enumerate(range(0, len(coded), BLOCK_SIZE)):
        block = coded[start:start + BLOCK_SIZE]
        if len(block) <= parity:
            raise DecodeError("Block is not longer than its parity", block_index=index)
        try:
            result = codec.decode(block)
        except ReedSolomonError as e:
            raise DecodeError(f"Uncorrectable Reed-Solomon block: {e}", block_index=index) from e
        # reedsolo >= 1.0 returns (message, message+ecc, errata positions)
        payload += result[0] if isinstance(result, tuple) else result
    return bytes(payload)
