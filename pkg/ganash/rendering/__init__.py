"""
Rendering and UI components
"""

from .renderer import ResponseRenderer

__all__ = ['ResponseRenderer']
