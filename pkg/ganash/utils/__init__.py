"""
Image buffers and sample data helpers
"""

from .images import ImageBuffer, stack_images
from .samples import synthetic_cover, write_sample_set

__all__ = ['ImageBuffer', 'stack_images', 'synthetic_cover', 'write_sample_set']
