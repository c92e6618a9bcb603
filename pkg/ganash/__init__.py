"""
GANash - adversarially trained image steganography with a numpy tensor engine
"""

__version__ = "1.0.0"
__author__ = "GANash"

# Core imports for easy access
from .core.shell import StegoShell
from .core.system_info import SystemInfo
from .models.manager import ModelManager
from .presets.manager import PresetManager
from .rendering.renderer import ResponseRenderer

__all__ = [
    'StegoShell',
    'ModelManager',
    'PresetManager',
    'ResponseRenderer',
    'SystemInfo',
]
