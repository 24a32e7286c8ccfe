"""
Prediction-quality analytics over a TripleSet.

Masked metrics rank only the legal moves of each board; the unmasked
validity rate looks at the globally most excited of the 60 outputs.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from othellonet.dataset import INDEX_TO_CELL, EmptyDataset, TripleSet, bitboards, target_indices
from othellonet.policy.base import Policy

logger = logging.getLogger(__name__)

# the fifth move is the same under symmetry in every game
DEFAULT_MIN_MOVE = 6


def _legal_output_mask(data: TripleSet) -> np.ndarray:
    """(N, 60) bool: output cell is a legal move."""
    bits = bitboards.unpack(data.legal_masks()).astype(bool)
    return bits[:, INDEX_TO_CELL]


def masked_ranks(confidences: np.ndarray, legal: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """
    Rank (0 = best) of each target among the legal outputs. Higher confidence
    ranks first; equal confidence ranks the lower output index first.
    """
    n = len(targets)
    rows = np.arange(n)
    target_scores = confidences[rows, targets].reshape(-1, 1)
    index = np.arange(confidences.shape[1]).reshape(1, -1)
    ahead = (confidences > target_scores) | ((confidences == target_scores) & (index < targets.reshape(-1, 1)))
    return (ahead & legal).sum(axis=1)


def _require(data: TripleSet) -> None:
    if len(data) == 0:
        raise EmptyDataset("Dataset is empty")


def _confidences(policy: Policy, data: TripleSet) -> np.ndarray:
    scores = policy.confidences_batch(data)
    if scores is None:
        raise ValueError(f"{policy.name} has no confidence vector; only top-1 metrics apply")
    return scores


def unmasked_validity_rate(policy: Policy, data: TripleSet) -> float:
    """Percentage of boards whose most excited output (all 60, lowest index on ties) is legal."""
    _require(data)
    scores = _confidences(policy, data)
    top = np.argmax(scores, axis=1)
    legal = _legal_output_mask(data)
    return 100.0 * float(legal[np.arange(len(data)), top].mean())


def masked_topk_accuracy(policy: Policy, data: TripleSet, k: int = 1) -> float:
    _require(data)
    if k < 1:
        raise ValueError("k must be >= 1")
    ranks = masked_ranks(_confidences(policy, data), _legal_output_mask(data), target_indices(data.target))
    return 100.0 * float((ranks < k).mean())


def policy_hits(policy: Policy, data: TripleSet) -> np.ndarray:
    """Per example: the policy's chosen move equals the recorded target."""
    scores = policy.confidences_batch(data)
    if scores is not None:
        ranks = masked_ranks(scores, _legal_output_mask(data), target_indices(data.target))
        return ranks == 0
    boards = data.boards()
    return np.fromiter((policy.choose(b) == int(t) for b, t in zip(boards, data.target)), dtype=bool, count=len(data))


@dataclass
class AccuracyGrid:
    """Top-k hit counts keyed by (move number, legal-move count)."""

    ks: Tuple[int, ...]
    min_move: int = DEFAULT_MIN_MOVE
    totals: Dict[Tuple[int, int], int] = field(default_factory=lambda: defaultdict(int))
    hits: Dict[int, Dict[Tuple[int, int], int]] = field(default_factory=dict)

    def cells(self) -> List[Tuple[int, int]]:
        return sorted(self.totals)

    def accuracy(self, k: int, move_number: int, legal_count: int) -> float:
        total = self.totals.get((move_number, legal_count), 0)
        if not total:
            return float("nan")
        return 100.0 * self.hits[k].get((move_number, legal_count), 0) / total

    def overall(self, k: int) -> float:
        total = sum(self.totals.values())
        return 100.0 * sum(self.hits[k].values()) / total if total else float("nan")

    def by_move_number(self, k: int) -> Dict[int, float]:
        totals, hits = defaultdict(int), defaultdict(int)
        for (move, legal), count in self.totals.items():
            totals[move] += count
            hits[move] += self.hits[k].get((move, legal), 0)
        return {m: 100.0 * hits[m] / totals[m] for m in sorted(totals)}

    def to_tsv(self) -> str:
        header = "move_number\tlegal_moves\tcount\t" + "\t".join(f"top{k}" for k in self.ks)
        lines = [header]
        for cell in self.cells():
            accs = "\t".join(f"{self.accuracy(k, *cell):.2f}" for k in self.ks)
            lines.append(f"{cell[0]}\t{cell[1]}\t{self.totals[cell]}\t{accs}")
        return "\n".join(lines) + "\n"


def accuracy_grid(
    policy: Policy,
    data: TripleSet,
    ks: Sequence[int] = (1, 2, 3),
    min_move: int = DEFAULT_MIN_MOVE,
) -> AccuracyGrid:
    """Masked top-k accuracy factored by move number (from `min_move`) and legal-move count."""
    _require(data)
    ks = tuple(sorted(set(ks)))
    if ks[0] < 1:
        raise ValueError("k must be >= 1")

    move_numbers = data.move_numbers()
    keep = np.flatnonzero(move_numbers >= min_move)
    grid = AccuracyGrid(ks, min_move, hits={k: defaultdict(int) for k in ks})
    if len(keep) == 0:
        return grid
    subset = data[keep]
    legal = _legal_output_mask(subset)
    legal_counts = legal.sum(axis=1)

    scores = policy.confidences_batch(subset)
    if scores is None:
        if ks != (1,):
            raise ValueError(f"{policy.name} has no confidence vector; only k=1 is available")
        ranks = np.where(policy_hits(policy, subset), 0, 1)
    else:
        ranks = masked_ranks(scores, legal, target_indices(subset.target))

    for move, count, rank in zip(move_numbers[keep], legal_counts, ranks):
        key = (int(move), int(count))
        grid.totals[key] += 1
        for k in ks:
            if rank < k:
                grid.hits[k][key] += 1
    logger.debug(f"Accuracy grid: {len(grid.totals)} populated cells over {len(keep)} examples")
    return grid
