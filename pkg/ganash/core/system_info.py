"""
Host description attached to timing reports
"""

import os
import platform
from typing import Dict

import numpy as np
import psutil
from rich.table import Table


class SystemInfo:
    """Detect the hardware and library versions that timings depend on"""

    def __init__(self):
        """
        Sets the following instance variables:

        - os_name: operating system name (e.g. 'Linux', 'Darwin', 'Windows')
        - architecture: machine architecture (e.g. 'x86_64', 'arm64')
        - python_version: interpreter version
        - processor: CPU model string reported by the platform (may be empty)
        - cpu_count / physical_cores: logical and physical core counts
        - memory_gb: total RAM in GiB
        - numpy_version: version of the array library doing the arithmetic
        """
        self.os_name = platform.system()
        self.os_version = platform.release()
        self.architecture = platform.machine()
        self.python_version = platform.python_version()
        self.processor = platform.processor() or platform.machine()
        self.cpu_count = psutil.cpu_count(logical=True) or os.cpu_count() or 1
        self.physical_cores = psutil.cpu_count(logical=False) or self.cpu_count
        self.memory_gb = psutil.virtual_memory().total / 1024 ** 3
        self.numpy_version = np.__version__

    def as_dict(self) -> Dict[str, str]:
        return {
            "OS": f"{self.os_name} {self.os_version}",
            "Architecture": self.architecture,
            "Processor": self.processor,
            "Cores": f"{self.physical_cores} physical / {self.cpu_count} logical",
            "Memory": f"{self.memory_gb:.1f} GiB",
            "Python": self.python_version,
            "numpy": self.numpy_version,
        }

    def get_context_string(self) -> str:
        """One line per field, used as the comment header of bench CSVs"""
        return "\n".join(f"{key}: {value}" for key, value in self.as_dict().items())

    @staticmethod
    def resident_memory_mb() -> float:
        return psutil.Process().memory_info().rss / 1024 ** 2

    def table(self) -> Table:
        table = Table(title="Host")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="magenta")
        for key, value in self.as_dict().items():
            table.add_row(key, value)
        return table
