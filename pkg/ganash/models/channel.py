"""
Text in, stego image out (and back) through trained encoder/decoder weights
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..codec import BitMessage, MessageTensorSpec, bits_to_text, pack_message, text_to_bits, unpack_message
from ..codec.reed_solomon import DEFAULT_PARITY
from ..errors import DecodeError, FormatError, StateError
from ..metrics.quality import timed
from ..utils.images import ImageBuffer
from .manager import ModelManager
from .networks import NetworkParams, decoder_forward, encoder_forward


@dataclass
class EmbedResult:
    stego: ImageBuffer
    message: BitMessage
    # 1 x H x W x D bit volume handed to the encoder
    packed: np.ndarray
    seconds: float


@dataclass
class ExtractResult:
    text: bytes
    message: BitMessage
    logits: np.ndarray
    seconds: float


class GanChannel:
    """Encoder/decoder pair with the RS framing and message packing around it"""

    def __init__(self, encoder: Optional[NetworkParams] = None, decoder: Optional[NetworkParams] = None):
        if encoder is not None and decoder is not None and encoder.data_depth != decoder.data_depth:
            raise FormatError(f"Encoder D={encoder.data_depth} and decoder D={decoder.data_depth} disagree")
        self.encoder = encoder
        self.decoder = decoder

    @classmethod
    def from_weights(cls, weights_dir: Union[str, Path], depth: Optional[int] = None,
                     encoder: bool = True, decoder: bool = True) -> "GanChannel":
        manager = ModelManager(weights_dir)
        return cls(
            manager.load("encoder", expected_depth=depth) if encoder else None,
            manager.load("decoder", expected_depth=depth) if decoder else None,
        )

    @property
    def data_depth(self) -> int:
        net = self.encoder or self.decoder
        if net is None:
            raise StateError("GanChannel has no networks loaded")
        return net.data_depth

    def _spec(self, image: ImageBuffer) -> MessageTensorSpec:
        return MessageTensorSpec(image.height, image.width, self.data_depth)

    def embed(self, cover: ImageBuffer, text: Union[str, bytes], parity_symbols: int = DEFAULT_PARITY) -> EmbedResult:
        """RS-code, pack and encode; the timing covers exactly this computation"""
        if self.encoder is None:
            raise StateError("No encoder weights loaded")

        def run():
            message = text_to_bits(text, parity_symbols)
            packed = pack_message(message, self._spec(cover))
            stego = encoder_forward(self.encoder, cover.to_tensor(self.encoder.dtype), packed, training=False)
            return ImageBuffer.from_tensor(stego), message, packed.data

        (stego, message, packed), seconds = timed(run)
        return EmbedResult(stego, message, packed, seconds)

    def extract(self, stego: ImageBuffer, parity_symbols: int = DEFAULT_PARITY) -> ExtractResult:
        """Decode, vote and RS-correct; raises DecodeError naming the failing block"""
        if self.decoder is None:
            raise StateError("No decoder weights loaded")
        state = {}

        def run():
            logits = decoder_forward(self.decoder, stego.to_tensor(self.decoder.dtype), training=False)
            state["logits"] = logits.data
            received = unpack_message(logits, self._spec(stego))
            if not received.byte_aligned:
                raise DecodeError(f"Recovered {len(received)} bits, not a whole number of bytes")
            state["message"] = BitMessage(received.bits, parity_symbols)
            return bits_to_text(state["message"], parity_symbols)

        text, seconds = timed(run)
        return ExtractResult(text, state["message"], state["logits"], seconds)
