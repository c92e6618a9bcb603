"""
Core GANash shell components
"""

from .shell import StegoShell, main
from .system_info import SystemInfo

__all__ = ['StegoShell', 'SystemInfo', 'main']
