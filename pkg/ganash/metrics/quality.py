"""
Image quality, payload, timing and bit-accuracy measures
"""

import math
import time
from typing import Any, Callable, Tuple, Union

import numpy as np

from ..codec.reed_solomon import BitMessage
from ..errors import DimensionError, ValidationError
from ..utils.images import ImageBuffer

SCALES = ("byte", "unit", "signed")
PSNR_INFINITY = math.inf

ImageLike = Union[ImageBuffer, np.ndarray]


def payload(bit_count: int, height: int, width: int) -> float:
    """Embedded bits per cover pixel"""
    if height <= 0 or width <= 0:
        raise ValidationError(f"Cover area must be positive, got {height}x{width}")
    if bit_count < 0:
        raise ValidationError(f"Bit count must be non-negative, got {bit_count}")
    return bit_count / (height * width)


def _values(image: ImageLike, scale: str) -> np.ndarray:
    """ImageBuffers are 8-bit and get converted to ``scale``; plain arrays are taken as already in it"""
    if scale not in SCALES:
        raise ValidationError(f"Unknown pixel scale '{scale}', choose from {', '.join(SCALES)}")
    if isinstance(image, ImageBuffer):
        values = image.pixels.astype(np.float64)
        if scale == "unit":
            return values / 255.0
        if scale == "signed":
            return values / 127.5 - 1.0
        return values
    return np.asarray(image, dtype=np.float64)


def _pair(cover: ImageLike, stego: ImageLike, scale: str) -> Tuple[np.ndarray, np.ndarray]:
    c, s = _values(cover, scale), _values(stego, scale)
    if c.shape != s.shape:
        raise DimensionError(f"Cover {c.shape} and stego {s.shape} differ in size")
    if c.size == 0:
        raise DimensionError("Images are empty")
    return c, s


def mse_metric(cover: ImageLike, stego: ImageLike, scale: str = "byte") -> float:
    """Mean squared pixel difference, averaged over rows, columns and channels"""
    c, s = _pair(cover, stego, scale)
    diff = c - s
    return float(np.mean(diff * diff))


def psnr_from_mse(mse: float, n: int = 8) -> float:
    """10 log10((2^n - 1)^2 / mse); ``inf`` when mse is zero"""
    if mse < 0:
        raise ValidationError(f"MSE must be non-negative, got {mse}")
    if mse == 0:
        return PSNR_INFINITY
    peak = float(2 ** n - 1)
    return 10.0 * math.log10(peak * peak / mse)


def psnr(cover: ImageLike, stego: ImageLike, n: int = 8) -> float:
    """PSNR in dB with the MSE taken at byte scale (the scale of 2^n - 1 for n = 8)"""
    return psnr_from_mse(mse_metric(cover, stego, scale="byte"), n)


def cross_correlation(cover: ImageLike, stego: ImageLike) -> float:
    """Pearson correlation over every pixel value of both images"""
    c, s = _pair(cover, stego, "byte")
    dc = c - c.mean()
    ds = s - s.mean()
    denominator = math.sqrt(float(np.sum(dc * dc)) * float(np.sum(ds * ds)))
    if denominator == 0.0:
        raise ValidationError("Correlation is undefined for a constant image")
    return float(np.clip(np.sum(dc * ds) / denominator, -1.0, 1.0))


def timed(fn: Callable[..., Any], *args, **kwargs) -> Tuple[Any, float]:
    """Call ``fn`` and return (result, wall-clock seconds on a monotonic clock)"""
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


timed_encode = timed
timed_decode = timed


def _bits(message: Union[BitMessage, np.ndarray]) -> np.ndarray:
    return message.bits if isinstance(message, BitMessage) else BitMessage(np.asarray(message)).bits


def bit_accuracy(sent: Union[BitMessage, np.ndarray], received: Union[BitMessage, np.ndarray]) -> float:
    """Fraction of positions where both messages agree"""
    a, b = _bits(sent), _bits(received)
    if a.size != b.size:
        raise ValidationError(f"Cannot compare {a.size} sent bits with {b.size} received bits")
    if a.size == 0:
        raise ValidationError("Cannot compute accuracy of empty messages")
    return float(np.count_nonzero(a == b)) / a.size
