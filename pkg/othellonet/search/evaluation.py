"""
Board evaluation functions, always from the side to move.

Every evaluator is antisymmetric: evaluate(b) == -evaluate(b.swap_sides()).
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Sequence, Tuple, Union

from othellonet.core import CELL_MAPS, Board, Symmetry, move_mask, popcount

logger = logging.getLogger(__name__)

DEFAULT_WPC_PATH = Path(__file__).resolve().parent.parent / "configs" / "wpc_default.txt"
CORNERS = (1 << 0) | (1 << 7) | (1 << 56) | (1 << 63)


class Evaluator(ABC):
    name: str = "eval"

    @abstractmethod
    def evaluate(self, board: Board) -> float:
        ...

    def __call__(self, board: Board) -> float:
        return self.evaluate(board)


def symmetrize(weights: Sequence[float]) -> Tuple[float, ...]:
    """Average a table over its 8 symmetric images."""
    if len(weights) != 64:
        raise ValueError(f"A WPC table has 64 weights, got {len(weights)}")
    # sorted orbit values give every cell of an orbit the same float sum
    return tuple(sum(sorted(float(weights[CELL_MAPS[s][c]]) for s in Symmetry)) / 8.0 for c in range(64))


def is_symmetric(weights: Sequence[float]) -> bool:
    return all(weights[CELL_MAPS[s][c]] == weights[c] for s in Symmetry for c in range(64))


class WPC(Evaluator):
    """Weighted piece counter: sum of weights under mover discs minus opponent discs."""

    def __init__(self, weights: Sequence[float], name: str = "wpc"):
        weights = tuple(float(w) for w in weights)
        if len(weights) != 64:
            raise ValueError(f"A WPC table has 64 weights, got {len(weights)}")
        if not is_symmetric(weights):
            raise ValueError("WPC table is not symmetric; pass it through symmetrize()")
        self.weights = weights
        self.name = name
        # per-byte partial sums so a mask costs 8 lookups
        self._tables: List[List[float]] = [
            [sum(weights[pos * 8 + bit] for bit in range(8) if value >> bit & 1) for value in range(256)]
            for pos in range(8)
        ]

    def mask_value(self, mask: int) -> float:
        total = 0.0
        for pos in range(8):
            byte = (mask >> (pos * 8)) & 0xFF
            if byte:
                total += self._tables[pos][byte]
        return total

    def evaluate(self, board: Board) -> float:
        return self.mask_value(board.mover) - self.mask_value(board.opponent)


class DiscDiff(Evaluator):
    name = "disc"

    def evaluate(self, board: Board) -> float:
        return float(popcount(board.mover) - popcount(board.opponent))


class MobilityMix(Evaluator):
    """Weighted sum of disc, mobility and corner differentials."""

    def __init__(self, disc_weight: float = 1.0, mobility_weight: float = 5.0, corner_weight: float = 25.0):
        self.disc_weight = disc_weight
        self.mobility_weight = mobility_weight
        self.corner_weight = corner_weight
        self.name = "mobility"

    def evaluate(self, board: Board) -> float:
        mover, opponent = board.mover, board.opponent
        discs = popcount(mover) - popcount(opponent)
        mobility = popcount(move_mask(mover, opponent)) - popcount(move_mask(opponent, mover))
        corners = popcount(mover & CORNERS) - popcount(opponent & CORNERS)
        return self.disc_weight * discs + self.mobility_weight * mobility + self.corner_weight * corners


def load_wpc(path: Union[str, Path] = DEFAULT_WPC_PATH) -> WPC:
    """Read 64 whitespace-separated weights; '#' starts a comment. Symmetrized on load."""
    path = Path(path)
    values = []
    for line in path.read_text().splitlines():
        values += [float(tok) for tok in line.split("#", 1)[0].split()]
    if len(values) != 64:
        raise ValueError(f"{path}: expected 64 weights, found {len(values)}")
    weights = symmetrize(values)
    if not is_symmetric(values):
        logger.warning(f"{path}: table was not symmetric and has been symmetrized")
    name = "wpc" if path == DEFAULT_WPC_PATH else f"wpc@{path}"
    return WPC(weights, name=name)


def make_evaluator(name: str) -> Evaluator:
    """wpc, wpc@<file>, disc or mobility."""
    if name == "wpc":
        return load_wpc()
    if name.startswith("wpc@"):
        return load_wpc(name[4:])
    if name == "disc":
        return DiscDiff()
    if name == "mobility":
        return MobilityMix()
    raise ValueError(f"Unknown evaluator {name!r}")
