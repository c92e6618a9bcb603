"""
Versioned binary weight files

Layout (all integers little-endian):

    magic        6 bytes  b"GANASH"
    version      u8       FORMAT_VERSION
    arch tag     u8       0 critic, 1 encoder, 2 decoder
    data depth   u16
    hidden dims  u16
    leaky alpha  f64
    record count u32
    records      name length u16, name utf-8, 4 x u32 dims, float32 values
"""

import struct
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Optional, Union

import numpy as np

from ..engine import Tensor
from ..errors import CorruptionError, FormatError
from .networks import ARCHITECTURES, NetworkParams, parameter_shapes

MAGIC = b"GANASH"
FORMAT_VERSION = 1
WEIGHT_SUFFIX = ".gnsh"

_HEADER = struct.Struct("<6sBBHHdI")
_NAME_LEN = struct.Struct("<H")
_DIMS = struct.Struct("<4I")


@dataclass
class WeightHeader:
    arch: str
    data_depth: int
    hidden_dims: int
    leaky_alpha: float
    record_count: int


def _pad_dims(shape) -> tuple:
    dims = tuple(shape) + (1,) * (4 - len(shape))
    if len(dims) != 4:
        raise FormatError(f"Cannot store a tensor of rank {len(shape)}")
    return dims


def save_params(params: NetworkParams, path: Union[str, Path]) -> Path:
    """Write ``params`` (including batch-norm running statistics) to ``path``"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(_HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            ARCHITECTURES.index(params.arch),
            params.data_depth,
            params.hidden_dims,
            params.leaky_alpha,
            len(params.tensors),
        ))
        for name, tensor in params.tensors.items():
            encoded = name.encode("utf-8")
            f.write(_NAME_LEN.pack(len(encoded)))
            f.write(encoded)
            f.write(_DIMS.pack(*_pad_dims(tensor.shape)))
            f.write(np.ascontiguousarray(tensor.data, dtype="<f4").tobytes())
    tmp.replace(path)
    return path


def _read_exact(f: BinaryIO, size: int, what: str) -> bytes:
    chunk = f.read(size)
    if len(chunk) != size:
        raise CorruptionError(f"Weight file truncated while reading {what}")
    return chunk


def _read_header(f: BinaryIO) -> WeightHeader:
    raw = f.read(_HEADER.size)
    if len(raw) < len(MAGIC) or raw[:len(MAGIC)] != MAGIC:
        raise FormatError("Not a GANash weight file (bad magic bytes)")
    if len(raw) != _HEADER.size:
        raise CorruptionError("Weight file truncated inside its header")
    magic, version, tag, depth, hidden, alpha, count = _HEADER.unpack(raw)
    if version != FORMAT_VERSION:
        raise FormatError(f"Unsupported weight format version {version} (this build reads {FORMAT_VERSION})")
    if tag >= len(ARCHITECTURES):
        raise FormatError(f"Unknown architecture tag {tag}")
    return WeightHeader(ARCHITECTURES[tag], depth, hidden, float(alpha), count)


def read_header(path: Union[str, Path]) -> WeightHeader:
    with open(path, "rb") as f:
        return _read_header(f)


def load_params(path: Union[str, Path], expected_arch: Optional[str] = None) -> NetworkParams:
    """Read a weight file; nothing is returned unless every record parses"""
    with open(path, "rb") as f:
        header = _read_header(f)
        if expected_arch is not None and header.arch != expected_arch:
            raise FormatError(
                f"Weight file {Path(path).name} holds architecture tag '{header.arch}', expected '{expected_arch}'"
            )
        shapes = parameter_shapes(header.arch, header.data_depth, header.hidden_dims)
        if header.record_count != len(shapes):
            raise CorruptionError(f"Expected {len(shapes)} tensor records, header says {header.record_count}")

        tensors = OrderedDict()
        for _ in range(header.record_count):
            (name_len,) = _NAME_LEN.unpack(_read_exact(f, _NAME_LEN.size, "a record name length"))
            name = _read_exact(f, name_len, "a record name").decode("utf-8", errors="replace")
            dims = _DIMS.unpack(_read_exact(f, _DIMS.size, f"dims of '{name}'"))
            if name not in shapes:
                raise CorruptionError(f"Unexpected tensor '{name}' in a {header.arch} weight file")
            count = int(np.prod(dims))
            if count != int(np.prod(shapes[name])) or _pad_dims(shapes[name]) != dims:
                raise CorruptionError(f"Tensor '{name}' has dims {dims}, expected {shapes[name]}")
            values = np.frombuffer(_read_exact(f, 4 * count, f"values of '{name}'"), dtype="<f4")
            values = values.astype(np.float32).reshape(shapes[name])
            is_buffer = name.endswith(".running_mean") or name.endswith(".running_var")
            tensors[name] = Tensor(values, requires_grad=not is_buffer, name=name)

        if f.read(1):
            raise CorruptionError("Trailing bytes after the last tensor record")

    params = NetworkParams(header.arch, header.data_depth, header.hidden_dims, header.leaky_alpha, tensors)
    params.check_consistency()
    return params
