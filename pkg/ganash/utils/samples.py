"""
Synthetic covers with natural-image-like (1/f) spectra
"""

from pathlib import Path
from typing import List, Union

import numpy as np

from .images import ImageBuffer


def synthetic_cover(height: int, width: int, seed: int, falloff: float = 1.0) -> ImageBuffer:
    """Smooth random RGB image whose amplitude spectrum decays like 1/f^falloff"""
    rng = np.random.default_rng(seed)
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    radius = np.sqrt(fx * fx + fy * fy)
    radius[0, 0] = 1.0
    envelope = 1.0 / radius ** falloff
    envelope[0, 0] = 0.0

    shared = rng.normal(size=(height, width))
    channels = []
    for _ in range(3):
        noise = 0.7 * shared + 0.3 * rng.normal(size=(height, width))
        field = np.real(np.fft.ifft2(np.fft.fft2(noise) * envelope))
        spread = field.max() - field.min()
        field = (field - field.min()) / (spread if spread > 0 else 1.0)
        channels.append(field)
    pixels = np.stack(channels, axis=-1) * 235.0 + 10.0
    return ImageBuffer(np.clip(np.rint(pixels), 0, 255).astype(np.uint8))


def write_sample_set(directory: Union[str, Path], count: int, height: int, width: int, seed: int = 0) -> List[Path]:
    """Write ``count`` synthetic PNG covers into ``directory``"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for index in range(count):
        path = directory / f"cover_{index:03d}.png"
        synthetic_cover(height, width, seed + index).save(path)
        paths.append(path)
    return paths
