"""
Network specs, parameters and the full forward/backward pipeline.

Usage:
    from othellonet.nn import preset, he_init, forward, loss, backward

    spec = preset("conv4", input_channels=2, batch_norm=True)
    params = he_init(spec, seed=0)
    trace = forward(spec, params, planes, train=True)
    value = loss(trace.outputs, targets, params, l2=5e-4)
    grads = backward(spec, params, trace, targets, l2=5e-4)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import torch

from othellonet.dataset.encoding import NUM_OUTPUTS
from othellonet.nn.errors import ShapeMismatch
from othellonet.nn.layers import (
    BatchNorm,
    Conv2D,
    Dropout,
    Flatten,
    ForwardContext,
    FullyConnected,
    Layer,
    ReLU,
    Softmax,
)

BOARD_SHAPE = (8, 8)

# Conv maps per layer for each named architecture
ARCHITECTURES: Dict[str, Tuple[int, ...]] = {
    "conv4": (64, 64, 128, 128),
    "conv6": (64, 64, 128, 128, 256, 256),
    "conv8": (64, 64, 128, 128, 256, 256, 256, 256),
    "linear": (),
}


@dataclass(frozen=True)
class NetworkSpec:
    layers: Tuple[Layer, ...]
    input_channels: int
    name: str = "custom"

    def __post_init__(self):
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.output_shape(shape)
        if not self.layers or not isinstance(self.layers[-1], Softmax):
            raise ShapeMismatch("A network must end with Softmax")
        if shape != (NUM_OUTPUTS,):
            raise ShapeMismatch(f"Network outputs {shape}, expected ({NUM_OUTPUTS},)")

    @property
    def input_shape(self) -> Tuple[int, int, int]:
        return (self.input_channels, *BOARD_SHAPE)

    def shapes(self) -> List[Tuple[int, ...]]:
        """Per-example activation shape after every layer."""
        shape, out = self.input_shape, []
        for layer in self.layers:
            shape = layer.output_shape(shape)
            out.append(shape)
        return out

    def parameter_names(self) -> List[str]:
        return [f"{i}.{name}" for i, layer in enumerate(self.layers) for name in layer.param_shapes()]

    def buffer_names(self) -> List[str]:
        return [f"{i}.{name}" for i, layer in enumerate(self.layers) for name in layer.buffer_shapes()]

    def decayed_names(self) -> List[str]:
        return [f"{i}.{name}" for i, layer in enumerate(self.layers) for name in layer.decayed()]

    def tensor_shapes(self) -> Dict[str, Tuple[int, ...]]:
        """Every stored tensor (parameters, then buffers per layer) in spec order."""
        shapes = {}
        for i, layer in enumerate(self.layers):
            for name, shape in {**layer.param_shapes(), **layer.buffer_shapes()}.items():
                shapes[f"{i}.{name}"] = shape
        return shapes

    def parameter_count(self) -> int:
        return sum(math.prod(shape) for layer in self.layers for shape in layer.param_shapes().values())

    def describe(self) -> str:
        parts = []
        for layer in self.layers:
            if isinstance(layer, Conv2D):
                parts.append(f"conv{layer.out_maps}")
            elif isinstance(layer, FullyConnected):
                parts.append(f"fc{layer.out_features}")
            elif isinstance(layer, BatchNorm):
                parts.append("bn")
            elif isinstance(layer, Dropout):
                parts.append(f"dropout{layer.rate:g}")
        return "->".join(parts)


def preset(
    arch: str,
    input_channels: int = 2,
    batch_norm: bool = False,
    dropout: float = 0.0,
    width: Optional[int] = None,
    fc_units: int = 128,
    bn_eps: float = 1e-5,
    bn_momentum: float = 0.99,
) -> NetworkSpec:
    """
    Build a named architecture.

    Args:
        arch: conv4, conv6, conv8 or linear (a single fc60 softmax layer).
        input_channels: Planes of the chosen encoding.
        batch_norm: Insert BatchNorm after every convolution, before ReLU.
        dropout: Dropout rate on the fc hidden layer; 0 disables it.
        width: If set, every conv layer uses this many maps (desk-scale runs).
        fc_units: Hidden fully-connected units.
    """
    if arch not in ARCHITECTURES:
        raise ValueError(f"Unknown architecture {arch!r}; choose from {sorted(ARCHITECTURES)}")
    maps = ARCHITECTURES[arch]
    if width is not None:
        maps = tuple(width for _ in maps)

    layers: List[Layer] = []
    channels = input_channels
    for out_maps in maps:
        layers.append(Conv2D(channels, out_maps))
        if batch_norm:
            layers.append(BatchNorm(out_maps, bn_eps, bn_momentum))
        layers.append(ReLU())
        channels = out_maps
    layers.append(Flatten())
    features = channels * BOARD_SHAPE[0] * BOARD_SHAPE[1]
    if maps:
        layers += [FullyConnected(features, fc_units), ReLU()]
        if dropout > 0:
            layers.append(Dropout(dropout))
        features = fc_units
    layers += [FullyConnected(features, NUM_OUTPUTS), Softmax()]

    name = arch + ("+bn" if batch_norm else "") + ("+dropout" if dropout > 0 else "")
    return NetworkSpec(tuple(layers), input_channels, name)


class Parameters:
    """Named tensors of a network: trainable parameters plus BatchNorm buffers."""

    def __init__(self, spec: NetworkSpec, tensors: Dict[str, torch.Tensor]):
        expected = spec.tensor_shapes()
        if set(tensors) != set(expected):
            raise ShapeMismatch(f"Tensor names {sorted(tensors)} do not match the network layers")
        for name, shape in expected.items():
            if tuple(tensors[name].shape) != tuple(shape):
                raise ShapeMismatch(f"{name}: shape {tuple(tensors[name].shape)}, expected {shape}")
        self.spec = spec
        self.tensors = {name: tensors[name] for name in expected}

    def __getitem__(self, name: str) -> torch.Tensor:
        return self.tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def layer(self, index: int) -> Dict[str, torch.Tensor]:
        prefix = f"{index}."
        return {k[len(prefix):]: v for k, v in self.tensors.items() if k.startswith(prefix)}

    def trainable(self) -> Dict[str, torch.Tensor]:
        names = self.spec.parameter_names()
        return {name: self.tensors[name] for name in names}

    def clone(self) -> "Parameters":
        return Parameters(self.spec, {k: v.clone() for k, v in self.tensors.items()})

    def to(self, dtype: torch.dtype) -> "Parameters":
        return Parameters(self.spec, {k: v.to(dtype) for k, v in self.tensors.items()})

    @property
    def dtype(self) -> torch.dtype:
        return next(iter(self.tensors.values())).dtype

    def equal(self, other: "Parameters") -> bool:
        return self.tensors.keys() == other.tensors.keys() and all(
            torch.equal(v, other.tensors[k]) for k, v in self.tensors.items()
        )


def he_init(spec: NetworkSpec, seed: int = 0, dtype: torch.dtype = torch.float32) -> Parameters:
    """Gaussian weights with variance 2 / fan_in, zero biases, unit BatchNorm scale."""
    generator = torch.Generator().manual_seed(seed)
    tensors = {}
    for i, layer in enumerate(spec.layers):
        for name, shape in layer.param_shapes().items():
            key = f"{i}.{name}"
            if name == "weight":
                fan_in = math.prod(shape[1:])
                std = math.sqrt(2.0 / fan_in)
                tensors[key] = torch.randn(shape, generator=generator, dtype=dtype) * std
            elif name == "gamma":
                tensors[key] = torch.ones(shape, dtype=dtype)
            else:
                tensors[key] = torch.zeros(shape, dtype=dtype)
        for name, shape in layer.buffer_shapes().items():
            fill = torch.ones if name == "running_var" else torch.zeros
            tensors[f"{i}.{name}"] = fill(shape, dtype=dtype)
    return Parameters(spec, tensors)


@dataclass
class Trace:
    """Forward-pass record consumed by backward()."""

    outputs: torch.Tensor
    logits: torch.Tensor
    caches: List[object] = field(default_factory=list)
    train: bool = False


def forward(
    spec: NetworkSpec,
    params: Parameters,
    batch: torch.Tensor,
    train: bool = False,
    generator: Optional[torch.Generator] = None,
    dropout_masks: Optional[Dict[int, torch.Tensor]] = None,
    update_running: bool = True,
) -> Trace:
    if tuple(batch.shape[1:]) != spec.input_shape:
        raise ShapeMismatch(f"Batch shape {tuple(batch.shape)} does not match input {spec.input_shape}")
    ctx = ForwardContext(train, generator, dropout_masks or {}, update_running)
    x, logits, caches = batch, None, []
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, Softmax):
            logits = x
        ctx.layer_index = i
        x, cache = layer.forward(params.layer(i), x, ctx)
        caches.append(cache)
    return Trace(outputs=x, logits=logits, caches=caches, train=train)


def predict(spec: NetworkSpec, params: Parameters, batch: torch.Tensor) -> torch.Tensor:
    """Infer-mode softmax outputs."""
    with torch.no_grad():
        return forward(spec, params, batch.to(params.dtype), train=False).outputs


def l2_penalty(params: Parameters, l2: float) -> torch.Tensor:
    total = sum((params[name] ** 2).sum() for name in params.spec.decayed_names())
    return 0.5 * l2 * total


def loss(outputs: torch.Tensor, targets: torch.Tensor, params: Optional[Parameters] = None, l2: float = 0.0) -> float:
    """Mean cross-entropy of `outputs` (probabilities) plus (l2 / 2) * sum of squared weights."""
    picked = outputs.gather(1, targets.reshape(-1, 1).long()).clamp_min(torch.finfo(outputs.dtype).tiny)
    value = -torch.log(picked).mean()
    if params is not None and l2:
        value = value + l2_penalty(params, l2)
    return float(value)


def backward(
    spec: NetworkSpec,
    params: Parameters,
    trace: Trace,
    targets: torch.Tensor,
    l2: float = 0.0,
    return_input_grad: bool = False,
):
    """
    Gradients of loss() with respect to every trainable parameter.

    Softmax and cross-entropy are fused: the gradient entering the logits is
    (p - onehot) / N.
    """
    n = trace.outputs.shape[0]
    onehot = torch.zeros_like(trace.outputs)
    onehot.scatter_(1, targets.reshape(-1, 1).long(), 1.0)
    dy = (trace.outputs - onehot) / n

    grads: Dict[str, torch.Tensor] = {}
    for i in range(len(spec.layers) - 2, -1, -1):
        layer = spec.layers[i]
        dy, layer_grads = layer.backward(params.layer(i), trace.caches[i], dy)
        for name, g in layer_grads.items():
            grads[f"{i}.{name}"] = g
    if l2:
        for name in spec.decayed_names():
            grads[name] = grads[name] + l2 * params[name]
    ordered = {name: grads[name] for name in spec.parameter_names()}
    if return_input_grad:
        return ordered, dy
    return ordered

