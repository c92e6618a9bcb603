"""
Exception hierarchy shared by every GANash component
"""

from typing import Optional


class GanashError(Exception):
    """Base class for all GANash failures; carries the shell exit code"""

    exit_code = 1


class ValidationError(GanashError):
    """Bad argument, config key or input value"""

    exit_code = 2


class DimensionError(ValidationError):
    """Tensor shapes that do not fit together"""


class StateError(GanashError):
    """Operation called in the wrong state (e.g. tape already consumed)"""


class FormatError(ValidationError):
    """Weight file header does not match what was expected"""


class CorruptionError(ValidationError):
    """File ended early or holds inconsistent records"""


class DataError(ValidationError):
    """No usable training images"""


class DivergenceError(GanashError):
    """A loss became NaN or infinite"""

    exit_code = 3

    def __init__(self, term: str, value: float, step: Optional[int] = None):
        self.term = term
        self.value = value
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"Non-finite loss {term}={value}{where}")


class CapacityError(GanashError):
    """Message does not fit into the carrier"""

    exit_code = 4

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(f"Message needs {required} bits but only {available} bits are available")


class DecodeError(GanashError):
    """Message could not be recovered"""

    exit_code = 5

    def __init__(self, message: str, block_index: Optional[int] = None):
        self.block_index = block_index
        if block_index is not None:
            message = f"{message} (block {block_index})"
        super().__init__(message)
