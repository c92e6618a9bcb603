"""
Baseline steganography channels
"""

from .lsb import (
    LsbConfig,
    lsb_capacity,
    lsb_decode,
    lsb_embed_text,
    lsb_encode,
    lsb_extract_text,
    lsb_max_deviation,
    max_payload,
)

__all__ = [
    'LsbConfig', 'lsb_capacity', 'lsb_decode', 'lsb_embed_text', 'lsb_encode', 'lsb_extract_text',
    'lsb_max_deviation', 'max_payload',
]
