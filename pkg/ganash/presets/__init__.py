"""
Bundled training presets
"""

from .manager import PresetManager

__all__ = ['PresetManager']
