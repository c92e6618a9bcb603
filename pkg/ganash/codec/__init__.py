"""
Message coding: Reed-Solomon text framing and tensor packing
"""

from .reed_solomon import BitMessage, DEFAULT_PARITY, bits_to_text, coded_length, text_to_bits
from .message import HEADER_BITS, MessageTensorSpec, pack_message, unpack_message

__all__ = [
    'BitMessage', 'DEFAULT_PARITY', 'text_to_bits', 'bits_to_text', 'coded_length',
    'HEADER_BITS', 'MessageTensorSpec', 'pack_message', 'unpack_message',
]
