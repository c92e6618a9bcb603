"""
8-bit RGB image buffers and PNG I/O
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from PIL import Image

from ..engine import Tensor, Tensor4
from ..errors import DimensionError, ValidationError


@dataclass(eq=False)
class ImageBuffer:
    """H x W x 3 uint8 pixels"""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise DimensionError(f"ImageBuffer needs H x W x 3 pixels, got shape {pixels.shape}")
        if pixels.dtype != np.uint8:
            if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
                raise ValidationError("Pixel values must lie in [0, 255]")
            pixels = np.rint(pixels).astype(np.uint8)
        self.pixels = pixels

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self):
        return self.pixels.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    def copy(self) -> "ImageBuffer":
        return ImageBuffer(self.pixels.copy())

    def to_tensor(self, dtype=np.float32) -> Tensor4:
        """1 x H x W x 3 tensor with v -> v / 127.5 - 1"""
        normalized = self.pixels.astype(dtype) / 127.5 - 1.0
        return Tensor4(normalized[np.newaxis])

    @classmethod
    def from_tensor(cls, tensor: Union[Tensor, np.ndarray], index: int = 0) -> "ImageBuffer":
        """Inverse of :meth:`to_tensor`, clamped and rounded to 8 bits"""
        data = tensor.data if isinstance(tensor, Tensor) else np.asarray(tensor)
        if data.ndim == 4:
            data = data[index]
        pixels = np.clip(np.rint((data.astype(np.float64) + 1.0) * 127.5), 0, 255).astype(np.uint8)
        return cls(pixels)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ImageBuffer":
        with Image.open(path) as image:
            return cls(np.array(image.convert("RGB"), dtype=np.uint8))

    def save(self, path: Union[str, Path]) -> None:
        Image.fromarray(self.pixels).save(path, format="PNG")

    def crop(self, top: int, left: int, height: int, width: int) -> "ImageBuffer":
        if top < 0 or left < 0 or top + height > self.height or left + width > self.width:
            raise DimensionError(
                f"Crop {height}x{width} at ({top}, {left}) exceeds image {self.height}x{self.width}"
            )
        return ImageBuffer(self.pixels[top:top + height, left:left + width].copy())


def stack_images(images: Sequence[ImageBuffer], dtype=np.float32) -> Tensor4:
    """Normalise equally sized images into one B x H x W x 3 batch"""
    if not images:
        raise DimensionError("Cannot build a batch from zero images")
    shapes = {image.shape for image in images}
    if len(shapes) != 1:
        raise DimensionError(f"Batch images differ in size: {sorted(shapes)}")
    return Tensor4(np.concatenate([image.to_tensor(dtype).data for image in images], axis=0))
