"""
Critic, encoder and decoder networks built from the tensor engine
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from ..engine import (
    Tensor,
    Tensor4,
    batch_norm,
    concat_channels,
    conv2d,
    leaky_relu,
    reduce_mean,
    tanh,
)
from ..codec.reed_solomon import BitMessage
from ..errors import DimensionError, ValidationError
from ..utils.images import ImageBuffer

ARCHITECTURES = ("critic", "encoder", "decoder")
IMAGE_CHANNELS = 3
DEFAULT_HIDDEN_DIMS = 32
DEFAULT_LEAKY_ALPHA = 0.2
BN_EPS = 1e-5
BN_MOMENTUM = 0.9


class Stage(NamedTuple):
    name: str
    kernel: int
    in_channels: int
    out_channels: int
    batch_norm: bool


def stage_plan(arch: str, data_depth: int, hidden_dims: int = DEFAULT_HIDDEN_DIMS) -> List[Stage]:
    """Four-stage layout of each network"""
    if arch == "critic":
        first_in, last_kernel, last_out = IMAGE_CHANNELS, 1, 1
    elif arch == "encoder":
        first_in, last_kernel, last_out = IMAGE_CHANNELS + data_depth, 3, IMAGE_CHANNELS
    elif arch == "decoder":
        first_in, last_kernel, last_out = IMAGE_CHANNELS, 3, data_depth
    else:
        raise ValidationError(f"Unknown architecture '{arch}', choose from {', '.join(ARCHITECTURES)}")
    return [
        Stage("stage1", 3, first_in, hidden_dims, True),
        Stage("stage2", 3, hidden_dims, hidden_dims, True),
        Stage("stage3", 3, hidden_dims, hidden_dims, True),
        Stage("stage4", last_kernel, hidden_dims, last_out, False),
    ]


def parameter_shapes(arch: str, data_depth: int, hidden_dims: int = DEFAULT_HIDDEN_DIMS) -> "OrderedDict[str, tuple]":
    """Name -> shape of every stored tensor, in file order"""
    shapes = OrderedDict()
    for stage in stage_plan(arch, data_depth, hidden_dims):
        shapes[f"{stage.name}.conv.weight"] = (stage.kernel, stage.kernel, stage.in_channels, stage.out_channels)
        shapes[f"{stage.name}.conv.bias"] = (stage.out_channels,)
        if stage.batch_norm:
            for suffix in ("gamma", "beta", "running_mean", "running_var"):
                shapes[f"{stage.name}.bn.{suffix}"] = (stage.out_channels,)
    return shapes


def _is_buffer(name: str) -> bool:
    return name.endswith(".running_mean") or name.endswith(".running_var")


@dataclass
class NetworkParams:
    """Named tensors of one network plus its hyperparameters"""

    arch: str
    data_depth: int
    hidden_dims: int = DEFAULT_HIDDEN_DIMS
    leaky_alpha: float = DEFAULT_LEAKY_ALPHA
    tensors: "OrderedDict[str, Tensor]" = field(default_factory=OrderedDict)

    def __post_init__(self):
        if self.arch not in ARCHITECTURES:
            raise ValidationError(f"Unknown architecture '{self.arch}', choose from {', '.join(ARCHITECTURES)}")
        if self.data_depth < 1:
            raise ValidationError(f"Data depth must be at least 1, got {self.data_depth}")

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def trainable(self) -> "OrderedDict[str, Tensor]":
        return OrderedDict((n, t) for n, t in self.tensors.items() if t.requires_grad)

    def buffers(self) -> "OrderedDict[str, Tensor]":
        return OrderedDict((n, t) for n, t in self.tensors.items() if not t.requires_grad)

    def parameter_count(self) -> int:
        return sum(t.size for t in self.trainable().values())

    def astype(self, dtype) -> "NetworkParams":
        """Deep copy with every tensor cast to ``dtype``"""
        tensors = OrderedDict((n, t.astype(dtype)) for n, t in self.tensors.items())
        return NetworkParams(self.arch, self.data_depth, self.hidden_dims, self.leaky_alpha, tensors)

    def copy(self) -> "NetworkParams":
        return self.astype(self.dtype)

    @property
    def dtype(self):
        first = next(iter(self.tensors.values()), None)
        return first.dtype if first is not None else np.float32

    def check_consistency(self) -> None:
        """Every stage's output width must match the next stage's input width"""
        expected = parameter_shapes(self.arch, self.data_depth, self.hidden_dims)
        for name, shape in expected.items():
            if name not in self.tensors:
                raise DimensionError(f"{self.arch} is missing tensor '{name}'")
            if self.tensors[name].shape != shape:
                raise DimensionError(f"{self.arch} tensor '{name}' has shape {self.tensors[name].shape}, expected {shape}")


_ARCH_STREAM = {arch: index for index, arch in enumerate(ARCHITECTURES)}


def init_params(
    arch: str,
    data_depth: int,
    seed: int,
    hidden_dims: int = DEFAULT_HIDDEN_DIMS,
    leaky_alpha: float = DEFAULT_LEAKY_ALPHA,
    dtype=np.float32,
) -> NetworkParams:
    """He-uniform kernels (variance 2/fan_in), zero biases, unit gamma, zero beta"""
    if data_depth < 1:
        raise ValidationError(f"Data depth must be at least 1, got {data_depth}")
    rng = np.random.default_rng([seed, _ARCH_STREAM.get(arch, 0)])
    tensors = OrderedDict()
    for name, shape in parameter_shapes(arch, data_depth, hidden_dims).items():
        if name.endswith(".conv.weight"):
            fan_in = shape[0] * shape[1] * shape[2]
            bound = np.sqrt(6.0 / fan_in)
            values = rng.uniform(-bound, bound, size=shape)
        elif name.endswith(".gamma") or name.endswith(".running_var"):
            values = np.ones(shape)
        else:
            values = np.zeros(shape)
        tensors[name] = Tensor(values.astype(dtype), requires_grad=not _is_buffer(name), name=name)
    return NetworkParams(arch, data_depth, hidden_dims, leaky_alpha, tensors)


def _expect(params: NetworkParams, arch: str) -> None:
    if params.arch != arch:
        raise ValidationError(f"Expected {arch} parameters, got {params.arch}")


def _conv(params: NetworkParams, stage: str, x: Tensor4) -> Tensor4:
    return conv2d(x, params[f"{stage}.conv.weight"], params[f"{stage}.conv.bias"], stride=1, padding="same")


def _norm(params: NetworkParams, stage: str, x: Tensor4, training: bool) -> Tensor4:
    return batch_norm(
        x,
        params[f"{stage}.bn.gamma"],
        params[f"{stage}.bn.beta"],
        params[f"{stage}.bn.running_mean"],
        params[f"{stage}.bn.running_var"],
        eps=BN_EPS,
        mode="train" if training else "infer",
        momentum=BN_MOMENTUM,
    )


def _check_image(x: Tensor, what: str) -> None:
    if x.ndim != 4:
        raise DimensionError(f"{what} needs a B x H x W x 3 tensor, got shape {x.shape}")
    if x.shape[3] != IMAGE_CHANNELS:
        raise DimensionError(f"{what} needs {IMAGE_CHANNELS} channels, got C={x.shape[3]}")


def critic_forward(params: NetworkParams, y: Tensor4, training: bool = False) -> Tensor4:
    """Score images: (conv3x3 -> leaky_relu -> batch_norm) x 3, conv1x1 -> 1 channel, mean over H, W.

    Returns a B x 1 x 1 x 1 tensor, one unbounded score per image.
    """
    _expect(params, "critic")
    _check_image(y, "critic input")
    h = y
    for stage in ("stage1", "stage2", "stage3"):
        h = _conv(params, stage, h)
        h = leaky_relu(h, params.leaky_alpha)
        h = _norm(params, stage, h, training)
    h = _conv(params, "stage4", h)
    return reduce_mean(h, axes="HW")


def encoder_forward(params: NetworkParams, cover: Tensor4, message: Tensor4, training: bool = False) -> Tensor4:
    """Embed ``message`` (B x H x W x D) into ``cover``; output lies in (-1, 1)"""
    _expect(params, "encoder")
    _check_image(cover, "encoder cover")
    if message.ndim != 4:
        raise DimensionError(f"encoder message needs a B x H x W x D tensor, got shape {message.shape}")
    if cover.shape[:3] != message.shape[:3]:
        raise DimensionError(
            f"encoder cover (B, H, W)={cover.shape[:3]} does not match message (B, H, W)={message.shape[:3]}"
        )
    if message.shape[3] != params.data_depth:
        raise DimensionError(f"encoder expects D={params.data_depth} message planes, got {message.shape[3]}")

    h = concat_channels(cover, message)
    for stage in ("stage1", "stage2", "stage3"):
        h = _conv(params, stage, h)
        h = _norm(params, stage, h, training)
    return tanh(_conv(params, "stage4", h))


def decoder_forward(params: NetworkParams, stego: Tensor4, training: bool = False) -> Tensor4:
    """Recover B x H x W x D message logits (no final activation)"""
    _expect(params, "decoder")
    _check_image(stego, "decoder input")
    h = stego
    for stage in ("stage1", "stage2", "stage3"):
        h = _conv(params, stage, h)
        h = _norm(params, stage, h, training)
    return _conv(params, "stage4", h)


@dataclass
class StegoPair:
    """Cover, its stego counterpart and the message hidden in it"""

    cover: ImageBuffer
    stego: ImageBuffer
    message: BitMessage

    def __post_init__(self):
        if self.cover.shape != self.stego.shape:
            raise DimensionError(f"Cover {self.cover.shape} and stego {self.stego.shape} differ in size")

