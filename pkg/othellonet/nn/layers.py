"""
Layer types with explicit forward and backward passes.

Layers are immutable specs; parameters live outside them in a dict keyed by
local name ("weight", "bias", "gamma", ...). Activations are torch tensors
in NCHW layout. Nothing here relies on autograd.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import torch
import torch.nn.functional as F

from othellonet.nn.errors import ShapeMismatch

Shape = Tuple[int, ...]
Tensors = Dict[str, torch.Tensor]


@dataclass
class ForwardContext:
    train: bool = False
    generator: Optional[torch.Generator] = None
    # layer index -> fixed dropout mask (already scaled by 1 / (1 - rate))
    dropout_masks: Dict[int, torch.Tensor] = field(default_factory=dict)
    update_running: bool = True
    layer_index: int = 0


class Layer:
    tag: int = 0

    def output_shape(self, shape: Shape) -> Shape:
        return shape

    def param_shapes(self) -> Dict[str, Shape]:
        return {}

    def buffer_shapes(self) -> Dict[str, Shape]:
        return {}

    def decayed(self) -> Tuple[str, ...]:
        """Parameter names subject to the L2 penalty."""
        return ()

    def ints(self) -> Tuple[int, ...]:
        return ()

    def reals(self) -> Tuple[float, ...]:
        return ()

    def forward(self, params: Tensors, x: torch.Tensor, ctx: ForwardContext):
        raise NotImplementedError

    def backward(self, params: Tensors, cache, dy: torch.Tensor) -> Tuple[torch.Tensor, Tensors]:
        raise NotImplementedError


@dataclass(frozen=True)
class Conv2D(Layer):
    in_channels: int
    out_maps: int
    kernel: int = 3
    stride: int = 1
    pad: int = 1
    tag = 1

    def output_shape(self, shape: Shape) -> Shape:
        if len(shape) != 3 or shape[0] != self.in_channels:
            raise ShapeMismatch(f"Conv2D expects ({self.in_channels}, H, W), got {shape}")
        _, h, w = shape
        out_h = (h + 2 * self.pad - self.kernel) // self.stride + 1
        out_w = (w + 2 * self.pad - self.kernel) // self.stride + 1
        return (self.out_maps, out_h, out_w)

    def param_shapes(self) -> Dict[str, Shape]:
        return {
            "weight": (self.out_maps, self.in_channels, self.kernel, self.kernel),
            "bias": (self.out_maps,),
        }

    def decayed(self) -> Tuple[str, ...]:
        return ("weight",)

    def ints(self) -> Tuple[int, ...]:
        return (self.in_channels, self.out_maps, self.kernel, self.stride, self.pad)

    def forward(self, params, x, ctx):
        n, _, h, w = x.shape
        cols = F.unfold(x, self.kernel, padding=self.pad, stride=self.stride)
        weight = params["weight"].reshape(self.out_maps, -1)
        out = weight @ cols + params["bias"].reshape(1, -1, 1)
        _, out_h, out_w = self.output_shape(tuple(x.shape[1:]))
        return out.reshape(n, self.out_maps, out_h, out_w), (cols, (h, w))

    def backward(self, params, cache, dy):
        cols, (h, w) = cache
        n = dy.shape[0]
        dy = dy.reshape(n, self.out_maps, -1)
        weight = params["weight"].reshape(self.out_maps, -1)
        grads = {
            "weight": torch.einsum("nmp,nkp->mk", dy, cols).reshape(params["weight"].shape),
            "bias": dy.sum(dim=(0, 2)),
        }
        dcols = weight.t() @ dy
        dx = F.fold(dcols, (h, w), self.kernel, padding=self.pad, stride=self.stride)
        return dx, grads


@dataclass(frozen=True)
class ReLU(Layer):
    tag = 2

    def forward(self, params, x, ctx):
        mask = x > 0
        return x * mask, mask

    def backward(self, params, cache, dy):
        return dy * cache, {}


@dataclass(frozen=True)
class BatchNorm(Layer):
    """Per-map normalisation; biased batch variance, running stats by EMA."""

    maps: int
    eps: float = 1e-5
    momentum: float = 0.99
    tag = 3

    def output_shape(self, shape: Shape) -> Shape:
        if shape[0] != self.maps:
            raise ShapeMismatch(f"BatchNorm over {self.maps} maps got input {shape}")
        return shape

    def param_shapes(self) -> Dict[str, Shape]:
        return {"gamma": (self.maps,), "beta": (self.maps,)}

    def buffer_shapes(self) -> Dict[str, Shape]:
        return {"running_mean": (self.maps,), "running_var": (self.maps,)}

    def ints(self) -> Tuple[int, ...]:
        return (self.maps,)

    def reals(self) -> Tuple[float, ...]:
        return (self.eps, self.momentum)

    @staticmethod
    def _view(t: torch.Tensor) -> torch.Tensor:
        return t.reshape(1, -1, 1, 1)

    def forward(self, params, x, ctx):
        if ctx.train:
            mean = x.mean(dim=(0, 2, 3))
            var = x.var(dim=(0, 2, 3), unbiased=False)
            if ctx.update_running:
                params["running_mean"].mul_(self.momentum).add_((1 - self.momentum) * mean)
                params["running_var"].mul_(self.momentum).add_((1 - self.momentum) * var)
        else:
            mean, var = params["running_mean"], params["running_var"]
        inv_std = torch.rsqrt(var + self.eps)
        x_hat = (x - self._view(mean)) * self._view(inv_std)
        out = x_hat * self._view(params["gamma"]) + self._view(params["beta"])
        return out, (x_hat, inv_std)

    def backward(self, params, cache, dy):
        x_hat, inv_std = cache
        count = dy.shape[0] * dy.shape[2] * dy.shape[3]
        grads = {
            "gamma": (dy * x_hat).sum(dim=(0, 2, 3)),
            "beta": dy.sum(dim=(0, 2, 3)),
        }
        dx_hat = dy * self._view(params["gamma"])
        sum_dx_hat = dx_hat.sum(dim=(0, 2, 3))
        sum_dx_hat_x_hat = (dx_hat * x_hat).sum(dim=(0, 2, 3))
        dx = (
            self._view(inv_std / count)
            * (count * dx_hat - self._view(sum_dx_hat) - x_hat * self._view(sum_dx_hat_x_hat))
        )
        return dx, grads


@dataclass(frozen=True)
class Dropout(Layer):
    """Inverted dropout: train-mode units are kept with prob 1 - rate and rescaled."""

    rate: float = 0.5
    tag = 4

    def reals(self) -> Tuple[float, ...]:
        return (self.rate,)

    def forward(self, params, x, ctx):
        if not ctx.train or self.rate == 0.0:
            return x, None
        mask = ctx.dropout_masks.get(ctx.layer_index)
        if mask is None:
            keep = torch.rand(x.shape, generator=ctx.generator, dtype=x.dtype) >= self.rate
            mask = keep.to(x.dtype) / (1.0 - self.rate)
        return x * mask, mask

    def backward(self, params, cache, dy):
        if cache is None:
            return dy, {}
        return dy * cache, {}


@dataclass(frozen=True)
class Flatten(Layer):
    tag = 5

    def output_shape(self, shape: Shape) -> Shape:
        size = 1
        for extent in shape:
            size *= extent
        return (size,)

    def forward(self, params, x, ctx):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, params, cache, dy):
        return dy.reshape(cache), {}


@dataclass(frozen=True)
class FullyConnected(Layer):
    in_features: int
    out_features: int
    tag = 6

    def output_shape(self, shape: Shape) -> Shape:
        if shape != (self.in_features,):
            raise ShapeMismatch(f"FullyConnected expects ({self.in_features},), got {shape}")
        return (self.out_features,)

    def param_shapes(self) -> Dict[str, Shape]:
        return {"weight": (self.out_features, self.in_features), "bias": (self.out_features,)}

    def decayed(self) -> Tuple[str, ...]:
        return ("weight",)

    def ints(self) -> Tuple[int, ...]:
        return (self.in_features, self.out_features)

    def forward(self, params, x, ctx):
        return x @ params["weight"].t() + params["bias"], x

    def backward(self, params, cache, dy):
        grads = {"weight": dy.t() @ cache, "bias": dy.sum(dim=0)}
        return dy @ params["weight"], grads


@dataclass(frozen=True)
class Softmax(Layer):
    """Output layer; backward() fuses its gradient with the cross-entropy loss."""

    tag = 7

    def forward(self, params, x, ctx):
        probs = torch.softmax(x, dim=1)
        return probs, probs


LAYER_TYPES = {cls.tag: cls for cls in (Conv2D, ReLU, BatchNorm, Dropout, Flatten, FullyConnected, Softmax)}


def layer_from_table(tag: int, ints: Tuple[int, ...], reals: Tuple[float, ...]) -> Layer:
    """Rebuild a layer from its checkpoint table entry."""
    try:
        cls = LAYER_TYPES[tag]
    except KeyError:
        raise ShapeMismatch(f"Unknown layer tag {tag}") from None
    return cls(*ints, *reals)
