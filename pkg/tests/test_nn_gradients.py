#!/usr/bin/env python3
"""Finite-difference checks of the hand-written backward passes.

Usage:
    pytest tests/test_nn_gradients.py
    python -m tests.test_nn_gradients --configs 20 --probes 8
"""

import argparse
import math
import random
import sys
from typing import Dict, List

import torch

from othellonet.nn import (
    BatchNorm,
    Conv2D,
    Dropout,
    Flatten,
    ForwardContext,
    FullyConnected,
    NetworkSpec,
    ReLU,
    Softmax,
    backward,
    forward,
    he_init,
    loss,
    preset,
)

H = 1e-5
TOLERANCE = 1e-4


def random_spec(rng: random.Random) -> NetworkSpec:
    """Small network mixing every layer type; the last conv stays 8x8."""
    channels = rng.choice([1, 2, 3])
    layers: List = []
    maps = channels
    for _ in range(rng.randint(1, 2)):
        out = rng.randint(2, 4)
        layers.append(Conv2D(maps, out))
        if rng.random() < 0.6:
            layers.append(BatchNorm(out))
        layers.append(ReLU())
        maps = out
    layers.append(Flatten())
    hidden = rng.randint(4, 12)
    layers += [FullyConnected(maps * 64, hidden), ReLU()]
    if rng.random() < 0.6:
        layers.append(Dropout(rng.choice([0.25, 0.5])))
    layers += [FullyConnected(hidden, 60), Softmax()]
    return NetworkSpec(tuple(layers), channels, "probe")


def _randomise(params, generator: torch.Generator) -> None:
    # non-trivial BatchNorm scale/shift and biases
    for name in params:
        if name.endswith(("gamma", "beta", "bias")):
            noise = torch.randn(params[name].shape, generator=generator, dtype=params.dtype) * 0.5
            params[name].copy_(noise + (1.0 if name.endswith("gamma") else 0.0))


def _dropout_masks(spec: NetworkSpec, batch: int, generator: torch.Generator) -> Dict[int, torch.Tensor]:
    masks = {}
    shapes = spec.shapes()
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, Dropout):
            keep = torch.rand((batch, *shapes[i]), generator=generator, dtype=torch.float64) >= layer.rate
            masks[i] = keep.to(torch.float64) / (1.0 - layer.rate)
    return masks


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-6)


def check_config(seed: int, probes: int = 6, l2: float = 1e-2) -> float:
    """Worst relative error over sampled parameter and input entries."""
    rng = random.Random(seed)
    generator = torch.Generator().manual_seed(seed)
    spec = random_spec(rng)
    params = he_init(spec, seed, dtype=torch.float64)
    _randomise(params, generator)

    batch = rng.randint(2, 5)
    x = torch.randn((batch, *spec.input_shape), generator=generator, dtype=torch.float64)
    targets = torch.randint(0, 60, (batch,), generator=generator)
    masks = _dropout_masks(spec, batch, generator)

    relus = [i for i, layer in enumerate(spec.layers) if isinstance(layer, ReLU)]

    def objective():
        trace = forward(spec, params, x, train=True, dropout_masks=masks, update_running=False)
        return loss(trace.outputs, targets, params, l2), [trace.caches[i] for i in relus]

    trace = forward(spec, params, x, train=True, dropout_masks=masks, update_running=False)
    grads, dx = backward(spec, params, trace, targets, l2, return_input_grad=True)

    worst = 0.0
    targets_to_probe = [(params[name], grads[name]) for name in spec.parameter_names()] + [(x, dx)]
    for tensor, grad in targets_to_probe:
        flat, flat_grad = tensor.view(-1), grad.reshape(-1)
        for _ in range(probes):
            i = rng.randrange(flat.numel())
            original = flat[i].item()
            flat[i] = original + H
            plus, plus_masks = objective()
            flat[i] = original - H
            minus, minus_masks = objective()
            flat[i] = original
            if any(not torch.equal(a, b) for a, b in zip(plus_masks, minus_masks)):
                # step crossed a ReLU kink
                continue
            numeric = (plus - minus) / (2 * H)
            worst = max(worst, relative_error(flat_grad[i].item(), numeric))
    return worst


def test_gradients_random_configs(configs: int = 20, probes: int = 4):
    for seed in range(configs):
        error = check_config(seed, probes)
        assert error < TOLERANCE, f"config {seed}: relative error {error:.2e}"


def test_relu_gradient_zero_for_negative_input():
    layer = ReLU()
    x = torch.tensor([[-1.0, 2.0, -0.5, 0.0]])
    _, cache = layer.forward({}, x, None)
    dx, _ = layer.backward({}, cache, torch.ones_like(x))
    assert dx.tolist() == [[0.0, 1.0, 0.0, 0.0]]


def test_duplicate_example_doubles_contribution():
    spec = preset("conv4", width=2, fc_units=8)
    params = he_init(spec, 1, dtype=torch.float64)
    generator = torch.Generator().manual_seed(2)
    a = torch.randn((1, 2, 8, 8), generator=generator, dtype=torch.float64)
    b = torch.randn((1, 2, 8, 8), generator=generator, dtype=torch.float64)
    ta, tb = torch.tensor([3]), torch.tensor([41])

    def grads(x, t):
        return backward(spec, params, forward(spec, params, x, train=True), t)

    triple = grads(torch.cat([a, a, b]), torch.cat([ta, ta, tb]))
    single_a, single_b = grads(a, ta), grads(b, tb)
    for name in triple:
        assert torch.allclose(3 * triple[name], 2 * single_a[name] + single_b[name], atol=1e-12)


def test_batchnorm_normalises_batch():
    layer = BatchNorm(3)
    params = {
        "gamma": torch.ones(3, dtype=torch.float64),
        "beta": torch.zeros(3, dtype=torch.float64),
        "running_mean": torch.zeros(3, dtype=torch.float64),
        "running_var": torch.ones(3, dtype=torch.float64),
    }
    generator = torch.Generator().manual_seed(0)
    x = torch.randn((16, 3, 8, 8), generator=generator, dtype=torch.float64) * 4 + 7

    out, _ = layer.forward(params, x, ForwardContext(train=True))
    assert out.mean(dim=(0, 2, 3)).abs().max() < 1e-5
    assert (out.var(dim=(0, 2, 3), unbiased=False) - 1).abs().max() < 1e-4
    # running statistics moved 1% of the way towards the batch statistics
    assert torch.allclose(params["running_mean"], 0.01 * x.mean(dim=(0, 2, 3)))


def test_dropout_rate_zero_and_expectation(samples: int = 4000):
    x = torch.linspace(-1, 1, 32, dtype=torch.float64).reshape(1, 32)
    identity, _ = Dropout(0.0).forward({}, x, ForwardContext(train=True))
    assert torch.equal(identity, x)

    layer = Dropout(0.5)
    ctx = ForwardContext(train=True, generator=torch.Generator().manual_seed(0))
    total = torch.zeros_like(x)
    for _ in range(samples):
        out, _ = layer.forward({}, x, ctx)
        total += out
    inferred, _ = layer.forward({}, x, ForwardContext(train=False))
    assert torch.equal(inferred, x)
    assert (total / samples - x).abs().max() < 0.1


def test_softmax_and_shapes():
    spec = preset("conv8", input_channels=2)
    assert spec.parameter_names()[0] == "0.weight"
    first = spec.layers[0].param_shapes()
    assert sum(math.prod(s) for s in first.values()) == 1216
    for layer in spec.layers:
        if isinstance(layer, Conv2D):
            assert math.prod(layer.param_shapes()["weight"]) + layer.out_maps == layer.out_maps * (9 * layer.in_channels + 1)
    for layer, shape in zip(spec.layers, spec.shapes()):
        if isinstance(layer, Conv2D):
            assert shape[1:] == (8, 8)

    small = preset("conv4", width=4, fc_units=16)
    params = he_init(small, 0)
    x = torch.rand((5, 2, 8, 8), generator=torch.Generator().manual_seed(0))
    outputs = forward(small, params, x).outputs
    assert (outputs > 0).all()
    assert torch.allclose(outputs.sum(dim=1), torch.ones(5), atol=1e-6)


def test_he_init_zero_biases():
    spec = preset("conv4", batch_norm=True, width=4)
    params = he_init(spec, 3)
    for name in spec.parameter_names():
        if name.endswith("bias") or name.endswith("beta"):
            assert torch.count_nonzero(params[name]) == 0
    assert he_init(spec, 3).equal(params)


def main():
    parser = argparse.ArgumentParser(description="Finite-difference gradient check")
    parser.add_argument("--configs", type=int, default=20)
    parser.add_argument("--probes", type=int, default=8)
    args = parser.parse_args()

    failed = 0
    for seed in range(args.configs):
        error = check_config(seed, args.probes)
        status = "OK" if error < TOLERANCE else "FAIL"
        failed += status == "FAIL"
        print(f"  [{status}] config {seed}: worst relative error {error:.2e}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
