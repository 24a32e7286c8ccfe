"""Seeded train/test partitioning."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from othellonet.core import Symmetry
from othellonet.dataset import bitboards
from othellonet.dataset.triples import DatasetVariant, TripleSet

logger = logging.getLogger(__name__)


class SplitOrder(Enum):
    BEFORE_AUGMENTATION = "before"
    AFTER_AUGMENTATION = "after"


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.25
    seed: int = 0
    split_order: SplitOrder = SplitOrder.BEFORE_AUGMENTATION

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")

    @classmethod
    def for_variant(
        cls,
        variant: DatasetVariant,
        seed: int = 0,
        split_order: SplitOrder = SplitOrder.BEFORE_AUGMENTATION,
    ) -> "SplitSpec":
        """25% test for asymmetric variants, 5% for symmetric ones."""
        return cls(0.05 if variant.symmetric else 0.25, seed, split_order)


def orbit_keys(data: TripleSet) -> np.ndarray:
    """
    Group id per example: examples share an id iff their boards lie in the
    same symmetry orbit. Ids are dense, ordered by the smallest orbit image.
    """
    best_m = data.mover.copy()
    best_o = data.opponent.copy()
    for sym in Symmetry:
        if sym is Symmetry.IDENTITY:
            continue
        m = bitboards.transform_masks(data.mover, sym)
        o = bitboards.transform_masks(data.opponent, sym)
        better = (m < best_m) | ((m == best_m) & (o < best_o))
        best_m = np.where(better, m, best_m)
        best_o = np.where(better, o, best_o)
    _, inverse = np.unique(np.stack([best_m, best_o], axis=1), axis=0, return_inverse=True)
    return inverse.reshape(-1)


def _test_size(n: int, fraction: float) -> int:
    return int(round(n * fraction))


def split(data: TripleSet, spec: SplitSpec) -> Tuple[TripleSet, TripleSet]:
    """
    Deterministic (train, test) partition; both keep the input order.

    BEFORE_AUGMENTATION assigns whole symmetry orbits to one side, filling the
    test side greedily in seeded orbit order without exceeding its target size.
    AFTER_AUGMENTATION is a plain seeded permutation of examples.
    """
    n = len(data)
    target = _test_size(n, spec.test_fraction)
    rng = np.random.default_rng(spec.seed)
    in_test = np.zeros(n, dtype=bool)

    if spec.split_order is SplitOrder.AFTER_AUGMENTATION or n == 0:
        in_test[rng.permutation(n)[:target]] = True
    else:
        keys = orbit_keys(data)
        sizes = np.bincount(keys)
        chosen = np.zeros(len(sizes), dtype=bool)
        filled = 0
        for group in rng.permutation(len(sizes)):
            if filled == target:
                break
            if filled + sizes[group] <= target:
                chosen[group] = True
                filled += int(sizes[group])
        in_test = chosen[keys]
        if filled != target:
            logger.info(f"Orbit split filled {filled} of {target} test examples; no remaining orbit fits")

    train, test = data[np.flatnonzero(~in_test)], data[np.flatnonzero(in_test)]
    logger.info(f"Split {n} examples: train={len(train)}, test={len(test)} ({spec.split_order.value} augmentation)")
    return train, test
