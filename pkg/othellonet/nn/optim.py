"""SGD with classical momentum and the half-epoch halving schedule."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping

import torch

from othellonet.nn.network import Parameters


@dataclass(frozen=True)
class TrainConfig:
    base_lr: float = 0.1
    momentum: float = 0.95
    l2: float = 5e-4
    batch_size: int = 256
    epochs: int = 24
    # 0 keeps the learning rate constant
    halvings_per_epoch: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.base_lr <= 0 or self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("base_lr, batch_size and epochs must be positive")
        if not 0 <= self.momentum < 1 or self.l2 < 0 or self.halvings_per_epoch < 0:
            raise ValueError("momentum must be in [0, 1); l2 and halvings_per_epoch must be >= 0")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "TrainConfig":
        """Build from a config mapping, ignoring unrelated keys."""
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known and v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class OptimizerState:
    """One zero-initialised velocity tensor per trainable parameter."""

    def __init__(self, params: Parameters):
        self.velocity = {name: torch.zeros_like(t) for name, t in params.trainable().items()}
        self.step = 0


def sgd_step(
    params: Parameters,
    grads: Dict[str, torch.Tensor],
    state: OptimizerState,
    lr: float,
    momentum: float,
) -> None:
    """In place: v <- momentum * v - lr * g; p <- p + v."""
    for name, velocity in state.velocity.items():
        velocity.mul_(momentum).sub_(lr * grads[name])
        params[name].add_(velocity)
    state.step += 1


def lr_at(step: int, steps_per_epoch: int, config: TrainConfig) -> float:
    """base_lr * 2^-k, k = completed 1/halvings_per_epoch fractions of an epoch."""
    if steps_per_epoch <= 0:
        raise ValueError("steps_per_epoch must be positive")
    halvings = step * config.halvings_per_epoch // steps_per_epoch
    return config.base_lr * 0.5**halvings
