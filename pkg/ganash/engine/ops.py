"""
Differentiable operators over NHWC tensors
"""

from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, ValidationError
from .tensor import Tensor, Tensor4, emit

AXIS_NAMES = "BHWC"

Axes = Union[str, int, Iterable[Union[str, int]]]


def _require_rank4(t: Tensor, what: str) -> None:
    if t.ndim != 4:
        raise DimensionError(f"{what} needs a rank-4 (B, H, W, C) tensor, got shape {t.shape}")


def _open_interval_bound(dtype) -> float:
    """Largest value strictly below 1 for the given float type"""
    return 1.0 - np.finfo(dtype).epsneg


def conv2d(x: Tensor, kernels: Tensor, bias: Tensor, stride: int = 1, padding: str = "same") -> Tensor4:
    """2-D convolution with (kh, kw, Cin, Cout) kernels.

    ``same`` padding pads (k-1)/2 on every side, so stride 1 keeps H and W;
    ``valid`` uses no padding.
    """
    _require_rank4(x, "conv2d input")
    if kernels.ndim != 4:
        raise DimensionError(f"conv2d kernels need shape (kh, kw, Cin, Cout), got {kernels.shape}")
    kh, kw, cin, cout = kernels.shape
    batch, height, width, channels = x.shape
    if channels != cin:
        raise DimensionError(f"conv2d channel mismatch: input C={channels} but kernel Cin={cin}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise DimensionError(f"conv2d kernel height/width must be odd, got kh={kh}, kw={kw}")
    if bias.shape != (cout,):
        raise DimensionError(f"conv2d bias needs shape ({cout},), got {bias.shape}")
    if not isinstance(stride, (int, np.integer)) or stride < 1:
        raise ValidationError(f"conv2d stride must be a positive integer, got {stride!r}")

    if padding == "same":
        ph, pw = (kh - 1) // 2, (kw - 1) // 2
    elif padding == "valid":
        ph, pw = 0, 0
    else:
        raise ValidationError(f"conv2d padding must be 'same' or 'valid', got {padding!r}")

    padded = np.pad(x.data, ((0, 0), (ph, ph), (pw, pw), (0, 0)))
    out_h = (padded.shape[1] - kh) // stride + 1
    out_w = (padded.shape[2] - kw) // stride + 1
    if out_h <= 0 or out_w <= 0:
        raise DimensionError(
            f"conv2d input H={height}, W={width} is smaller than the {kh}x{kw} kernel with {padding} padding"
        )

    windows = sliding_window_view(padded, (kh, kw), axis=(1, 2))[:, ::stride, ::stride][:, :out_h, :out_w]
    # (B, Ho, Wo, Cin, kh, kw) -> rows ordered (kh, kw, Cin) to match the kernel layout
    cols = windows.transpose(0, 1, 2, 4, 5, 3).reshape(batch * out_h * out_w, kh * kw * cin)
    kmat = kernels.data.reshape(kh * kw * cin, cout)
    out = (cols @ kmat + bias.data).reshape(batch, out_h, out_w, cout)

    def rule(grad):
        g2 = grad.reshape(-1, cout)
        d_kernels = (cols.T @ g2).reshape(kh, kw, cin, cout)
        d_bias = g2.sum(axis=0)
        d_cols = (g2 @ kmat.T).reshape(batch, out_h, out_w, kh, kw, cin)
        d_padded = np.zeros_like(padded, dtype=np.result_type(padded, grad))
        for i in range(kh):
            for j in range(kw):
                d_padded[:, i:i + stride * out_h:stride, j:j + stride * out_w:stride, :] += d_cols[:, :, :, i, j, :]
        d_x = d_padded[:, ph:ph + height, pw:pw + width, :]
        return d_x, d_kernels, d_bias

    return emit("conv2d", (x, kernels, bias), out, rule)


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: Tensor,
    running_var: Tensor,
    eps: float = 1e-5,
    mode: str = "train",
    momentum: float = 0.9,
) -> Tensor4:
    """Per-channel normalisation over (B, H, W).

    In ``train`` mode batch statistics normalise the input and the running
    statistics move by ``running = momentum * running + (1 - momentum) * batch``.
    In ``infer`` mode the running statistics are used and left untouched.
    """
    _require_rank4(x, "batch_norm input")
    channels = x.shape[3]
    for label, t in (("gamma", gamma), ("beta", beta), ("running_mean", running_mean), ("running_var", running_var)):
        if t.shape != (channels,):
            raise DimensionError(f"batch_norm {label} needs shape ({channels},), got {t.shape}")
    if eps <= 0:
        raise ValidationError(f"batch_norm eps must be positive, got {eps}")
    count = x.shape[0] * x.shape[1] * x.shape[2]
    if count == 0:
        raise DimensionError(f"batch_norm got an empty batch of shape {x.shape}")

    data = x.data
    if mode == "train":
        mean = data.mean(axis=(0, 1, 2))
        var = data.var(axis=(0, 1, 2))
        unbiased = var * count / (count - 1) if count > 1 else var
        running_mean.data[...] = momentum * running_mean.data + (1.0 - momentum) * mean
        running_var.data[...] = momentum * running_var.data + (1.0 - momentum) * unbiased
    elif mode == "infer":
        mean = running_mean.data
        var = running_var.data
    else:
        raise ValidationError(f"batch_norm mode must be 'train' or 'infer', got {mode!r}")

    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = (data - mean) * inv_std
    out = gamma.data * x_hat + beta.data

    def rule(grad):
        d_gamma = (grad * x_hat).sum(axis=(0, 1, 2))
        d_beta = grad.sum(axis=(0, 1, 2))
        d_xhat = grad * gamma.data
        if mode == "train":
            d_x = inv_std / count * (
                count * d_xhat
                - d_xhat.sum(axis=(0, 1, 2))
                - x_hat * (d_xhat * x_hat).sum(axis=(0, 1, 2))
            )
        else:
            d_x = d_xhat * inv_std
        return d_x, d_gamma, d_beta

    return emit("batch_norm", (x, gamma, beta), out.astype(data.dtype, copy=False), rule)


def leaky_relu(x: Tensor, alpha: float = 0.2) -> Tensor:
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"leaky_relu alpha must lie in (0, 1), got {alpha}")
    positive = x.data > 0
    out = np.where(positive, x.data, alpha * x.data).astype(x.dtype, copy=False)

    def rule(grad):
        return (np.where(positive, grad, alpha * grad),)

    return emit("leaky_relu", (x,), out, rule)


def tanh(x: Tensor) -> Tensor:
    bound = _open_interval_bound(x.dtype)
    out = np.clip(np.tanh(x.data), -bound, bound)

    def rule(grad):
        return (grad * (1.0 - out * out),)

    return emit("tanh", (x,), out, rule)


def _stable_sigmoid(values: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(values))
    return np.where(values >= 0, 1.0 / (1.0 + e), e / (1.0 + e)).astype(values.dtype, copy=False)


def sigmoid(x: Tensor) -> Tensor:
    tiny = np.finfo(x.dtype).tiny
    out = np.clip(_stable_sigmoid(x.data), tiny, _open_interval_bound(x.dtype))

    def rule(grad):
        return (grad * out * (1.0 - out),)

    return emit("sigmoid", (x,), out, rule)


def activation(x: Tensor, kind: str, alpha: float = 0.2) -> Tensor:
    """Element-wise activation by name: ``leaky_relu``, ``tanh`` or ``sigmoid``"""
    if kind == "leaky_relu":
        return leaky_relu(x, alpha)
    if kind == "tanh":
        return tanh(x)
    if kind == "sigmoid":
        return sigmoid(x)
    raise ValidationError(f"Unknown activation '{kind}'")


def _check_same_shape(a: Tensor, b: Tensor, what: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{what} needs identical shapes, got {a.shape} and {b.shape}")


def mse_loss(a: Tensor, b: Tensor) -> Tensor:
    """Mean of squared element-wise differences"""
    _check_same_shape(a, b, "mse_loss")
    diff = a.data - b.data
    count = diff.size
    out = np.asarray(np.mean(diff * diff))

    def rule(grad):
        d_a = grad * 2.0 * diff / count
        return d_a, -d_a

    return emit("mse_loss", (a, b), out, rule)


def sce_loss(logits: Tensor, targets: Tensor) -> Tensor:
    """Sigmoid cross-entropy averaged over every element.

    Uses ``max(x, 0) - x*t + log1p(exp(-|x|))`` so no log of a vanishing
    probability is ever taken.
    """
    _check_same_shape(logits, targets, "sce_loss")
    t = targets.data
    if not np.all((t == 0) | (t == 1)):
        raise ValidationError("sce_loss targets must be 0 or 1")
    x = logits.data
    count = x.size
    per_element = np.maximum(x, 0) - x * t + np.log1p(np.exp(-np.abs(x)))
    out = np.asarray(np.mean(per_element))

    def rule(grad):
        return grad * (_stable_sigmoid(x) - t) / count, None

    return emit("sce_loss", (logits, targets), out, rule)


def _axis_indices(axes: Axes, ndim: int) -> Tuple[int, ...]:
    if isinstance(axes, (str, int, np.integer)):
        axes = [axes] if not isinstance(axes, str) else list(axes)
    indices = []
    for axis in axes:
        if isinstance(axis, str):
            if axis.upper() not in AXIS_NAMES or ndim != 4:
                raise ValidationError(f"Unknown axis name {axis!r}; use a subset of 'BHWC' on rank-4 tensors")
            indices.append(AXIS_NAMES.index(axis.upper()))
        else:
            if not -ndim <= axis < ndim:
                raise ValidationError(f"Axis {axis} out of range for rank {ndim}")
            indices.append(int(axis) % ndim)
    if not indices:
        raise ValidationError("reduce needs at least one axis")
    return tuple(sorted(set(indices)))


def reduce_mean(x: Tensor, axes: Axes = "BHWC", keepdims: bool = True) -> Tensor:
    """Arithmetic mean over the named axes (names from 'BHWC' or integer axes)"""
    indices = _axis_indices(axes, x.ndim)
    count = int(np.prod([x.shape[i] for i in indices]))
    out = np.asarray(x.data.mean(axis=indices, keepdims=keepdims))

    def rule(grad):
        if not keepdims:
            grad = np.expand_dims(grad, indices)
        return (np.broadcast_to(grad / count, x.shape).copy(),)

    return emit("reduce_mean", (x,), out, rule)


def reduce_sum(x: Tensor, axes: Optional[Axes] = None, keepdims: bool = False) -> Tensor:
    """Sum over the given axes, or over everything when ``axes`` is None"""
    indices = tuple(range(x.ndim)) if axes is None else _axis_indices(axes, x.ndim)
    out = np.asarray(x.data.sum(axis=indices, keepdims=keepdims))

    def rule(grad):
        if not keepdims:
            grad = np.expand_dims(grad, indices)
        return (np.broadcast_to(grad, x.shape).copy(),)

    return emit("reduce_sum", (x,), out, rule)


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "add")

    def rule(grad):
        return grad, grad

    return emit("add", (a, b), a.data + b.data, rule)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "sub")

    def rule(grad):
        return grad, -grad

    return emit("sub", (a, b), a.data - b.data, rule)


def square(x: Tensor) -> Tensor:
    def rule(grad):
        return (2.0 * grad * x.data,)

    return emit("square", (x,), x.data * x.data, rule)


def sum_all(terms: Sequence[Tensor]) -> Tensor:
    """Left-to-right sum of equally shaped tensors"""
    total = terms[0]
    for term in terms[1:]:
        total = add(total, term)
    return total


def concat_channels(a: Tensor, b: Tensor) -> Tensor4:
    """Stack two NHWC tensors along C"""
    _require_rank4(a, "concat_channels")
    _require_rank4(b, "concat_channels")
    if a.shape[:3] != b.shape[:3]:
        raise DimensionError(
            f"concat_channels needs matching (B, H, W), got {a.shape[:3]} and {b.shape[:3]}"
        )
    split = a.shape[3]
    out = np.concatenate([a.data, b.data.astype(a.dtype, copy=False)], axis=3)

    def rule(grad):
        return grad[..., :split], grad[..., split:]

    return emit("concat_channels", (a, b), out, rule)
