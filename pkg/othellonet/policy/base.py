"""
Policy interface.

A policy maps a board to a move. Confidence-based policies score the 60
output cells and play the most confident legal one; ties go to the lowest
cell index. No policy uses randomness.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterable, Optional, Sequence

import numpy as np

from othellonet.core import PASS, Board, Move, legal_moves
from othellonet.dataset import CELL_TO_INDEX, TripleSet


class PolicyError(Exception):
    """Base class for policy construction and selection errors."""


class NoStage(PolicyError, ValueError):
    pass


class DescriptorError(PolicyError, ValueError):
    pass


def masked_argmax(confidences: np.ndarray, cells: Iterable[int]) -> Move:
    """Most confident cell among `cells`; PASS when there are none."""
    best, best_score = PASS, -np.inf
    for cell in sorted(cells):
        score = confidences[CELL_TO_INDEX[cell]]
        if best == PASS or score > best_score:
            best, best_score = cell, score
    return best


class Policy(ABC):
    name: str = "policy"

    @abstractmethod
    def choose(self, board: Board) -> Move:
        """Legal move for the side to move, or PASS when none exists."""

    def confidences(self, board: Board) -> Optional[np.ndarray]:
        """60-vector of output scores, or None for policies without one."""
        return None

    def confidences_batch(self, data: TripleSet) -> Optional[np.ndarray]:
        """(N, 60) scores for canonical boards; None when unsupported."""
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class ConfidencePolicy(Policy):
    """Policy that plays the masked argmax of its confidence vector."""

    @abstractmethod
    def confidences(self, board: Board) -> np.ndarray:
        ...

    def choose(self, board: Board) -> Move:
        moves = legal_moves(board)
        if len(moves) == 1:
            return moves[0]
        return masked_argmax(self.confidences(board), moves)

    def confidences_batch(self, data: TripleSet) -> np.ndarray:
        return np.stack([self.confidences(b) for b in data.boards()]) if len(data) else np.zeros((0, 60))


class FixedPolicy(ConfidencePolicy):
    """Constant confidence vector; used as a baseline and in tests."""

    def __init__(self, scores: Sequence[float], name: str = "fixed"):
        self.scores = np.asarray(scores, dtype=np.float64)
        if self.scores.shape != (60,):
            raise ValueError("A confidence vector has exactly 60 entries")
        self.name = name

    def confidences(self, board: Board) -> np.ndarray:
        return self.scores

    def confidences_batch(self, data: TripleSet) -> np.ndarray:
        return np.tile(self.scores, (len(data), 1))


def choose_move(policy: Policy, board: Board) -> Move:
    return policy.choose(board)
