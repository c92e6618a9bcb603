"""
Least-significant-bit embedding, the exact baseline channel

Bits are written row-major over pixels, R then G then B within a pixel.
With two planes each channel byte takes two consecutive message bits, the
first one in bit 1 and the second in bit 0.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..codec.message import HEADER_BITS, header_bits
from ..codec.reed_solomon import BitMessage, bits_to_text, text_to_bits
from ..errors import CapacityError, DecodeError, ValidationError
from ..utils.images import ImageBuffer

PLANES = (1, 2)


@dataclass(frozen=True)
class LsbConfig:
    planes: int = 1
    channel_order: str = "RGB"
    traversal: str = "row-major"

    def __post_init__(self):
        if self.planes not in PLANES:
            raise ValidationError(f"planes must be 1 or 2, got {self.planes}")
        if self.channel_order != "RGB" or self.traversal != "row-major":
            raise ValidationError("Only row-major RGB traversal is supported")


def lsb_capacity(height: int, width: int, cfg: LsbConfig = LsbConfig()) -> int:
    return height * width * 3 * cfg.planes


def max_payload(cfg: LsbConfig = LsbConfig(), per_channel: bool = False) -> float:
    """Bits per pixel at full capacity; ``per_channel`` gives the single-plane grayscale-style figure"""
    return float(cfg.planes) if per_channel else float(3 * cfg.planes)


def _bits_of(msg: Union[BitMessage, np.ndarray]) -> np.ndarray:
    return msg.bits if isinstance(msg, BitMessage) else BitMessage(np.asarray(msg)).bits


def lsb_encode(cover: ImageBuffer, msg: Union[BitMessage, np.ndarray], cfg: LsbConfig = LsbConfig()) -> ImageBuffer:
    bits = _bits_of(msg)
    available = lsb_capacity(cover.height, cover.width, cfg)
    if bits.size > available:
        raise CapacityError(int(bits.size), available)

    flat = cover.pixels.reshape(-1).copy()
    for j in range(cfg.planes):
        plane = cfg.planes - 1 - j
        chunk = bits[j::cfg.planes]
        keep = np.uint8(0xFF ^ (1 << plane))
        flat[:chunk.size] = (flat[:chunk.size] & keep) | (chunk << plane).astype(np.uint8)
    return ImageBuffer(flat.reshape(cover.shape))


def lsb_decode(stego: ImageBuffer, bit_count: int, cfg: LsbConfig = LsbConfig()) -> BitMessage:
    """Read ``bit_count`` low-plane bits back; there is no detection of whether anything was embedded"""
    available = lsb_capacity(stego.height, stego.width, cfg)
    if bit_count < 0:
        raise ValidationError(f"bit_count must be non-negative, got {bit_count}")
    if bit_count > available:
        raise CapacityError(bit_count, available)

    flat = stego.pixels.reshape(-1)
    bits = np.empty(bit_count, dtype=np.uint8)
    for j in range(cfg.planes):
        plane = cfg.planes - 1 - j
        count = len(range(j, bit_count, cfg.planes))
        bits[j::cfg.planes] = (flat[:count] >> plane) & 1
    return BitMessage(bits)


def lsb_embed_text(
    cover: ImageBuffer,
    text: Union[str, bytes],
    cfg: LsbConfig = LsbConfig(),
    parity_symbols: int = 0,
) -> Tuple[ImageBuffer, BitMessage]:
    """Embed ``text`` behind a 32-bit length header, RS-coded when ``parity_symbols`` > 0.

    Returns the stego image and the embedded bits (without the header).
    """
    if parity_symbols:
        message = text_to_bits(text, parity_symbols)
    else:
        data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
        if not data:
            raise ValidationError("Message text is empty")
        message = BitMessage.from_bytes(data)
    framed = np.concatenate([header_bits(len(message)), message.bits])
    return lsb_encode(cover, framed, cfg), message


def lsb_extract_text(stego: ImageBuffer, cfg: LsbConfig = LsbConfig(), parity_symbols: int = 0) -> bytes:
    available = lsb_capacity(stego.height, stego.width, cfg)
    if available < HEADER_BITS:
        raise DecodeError(f"Image holds only {available} bits, too few for a length header")
    header = lsb_decode(stego, HEADER_BITS, cfg).bits
    length = int(np.packbits(header).view(">u4")[0])
    if length == 0 or length % 8 or length > available - HEADER_BITS:
        raise DecodeError(f"Length header reads {length} bits, which does not fit this image")
    bits = lsb_decode(stego, HEADER_BITS + length, cfg).bits[HEADER_BITS:]
    if parity_symbols:
        return bits_to_text(BitMessage(bits, parity_symbols), parity_symbols)
    return BitMessage(bits).to_bytes()


def lsb_max_deviation(cfg: LsbConfig = LsbConfig()) -> int:
    return 2 ** cfg.planes - 1

