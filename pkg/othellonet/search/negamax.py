"""
Fixed-depth alpha-beta negamax.

A forced pass costs one ply, a double pass ends the game, and finished games
are valued by their exact disc differential times TERMINAL_SCALE so that a
proven result always outweighs a heuristic estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List

from othellonet.core import PASS, Board, Move, apply_move, iter_bits, move_mask, popcount
from othellonet.policy.base import Policy
from othellonet.search.evaluation import Evaluator

TERMINAL_SCALE = 1e6


class MoveOrdering(Enum):
    FIXED = "fixed"
    EVAL = "eval"


@dataclass(frozen=True)
class SearchConfig:
    depth: int
    evaluator: Evaluator
    ordering: MoveOrdering = MoveOrdering.FIXED
    pruning: bool = True

    def __post_init__(self):
        if not 1 <= self.depth <= 60:
            raise ValueError(f"Search depth must be in 1..60, got {self.depth}")


@dataclass(frozen=True)
class SearchResult:
    move: Move
    value: float
    nodes: int


def terminal_value(board: Board) -> float:
    return (popcount(board.mover) - popcount(board.opponent)) * TERMINAL_SCALE


class _Searcher:
    def __init__(self, config: SearchConfig):
        self.config = config
        self.evaluate = config.evaluator.evaluate
        self.nodes = 0

    def ordered(self, board: Board, moves: int, depth: int) -> List[int]:
        cells = list(iter_bits(moves))
        if self.config.ordering is MoveOrdering.EVAL and depth > 1 and len(cells) > 1:
            # best child for the mover first; stable sort keeps lower cells first on ties
            cells.sort(key=lambda c: self.evaluate(apply_move(board, c)))
        return cells

    def value(self, board: Board, depth: int, alpha: float, beta: float) -> float:
        self.nodes += 1
        mover, opponent = board.mover, board.opponent
        moves = move_mask(mover, opponent)
        if not moves:
            if not move_mask(opponent, mover):
                return terminal_value(board)
            if depth == 0:
                return self.evaluate(board)
            return -self.value(board.passed(), depth - 1, -beta, -alpha)
        if depth == 0:
            return self.evaluate(board)

        best = -math.inf
        for cell in self.ordered(board, moves, depth):
            score = -self.value(apply_move(board, cell), depth - 1, -beta, -alpha)
            if score > best:
                best = score
            if self.config.pruning:
                alpha = max(alpha, score)
                if alpha >= beta:
                    break
        return best

    def root(self, board: Board) -> SearchResult:
        self.nodes = 1
        depth = self.config.depth
        moves = move_mask(board.mover, board.opponent)
        if not moves:
            if not move_mask(board.opponent, board.mover):
                return SearchResult(PASS, terminal_value(board), self.nodes)
            value = -self.value(board.passed(), depth - 1, -math.inf, math.inf)
            return SearchResult(PASS, value, self.nodes)

        best_move, best = PASS, -math.inf
        for cell in self.ordered(board, moves, depth):
            child = apply_move(board, cell)
            alpha = best if self.config.pruning else -math.inf
            score = -self.value(child, depth - 1, -math.inf, -alpha)
            if self.config.pruning and score == best and cell < best_move:
                # a fail-low bound can equal best; only an exact value may win the tie
                score = -self.value(child, depth - 1, -math.inf, math.inf)
            if score > best or (score == best and cell < best_move):
                best_move, best = cell, score
        return SearchResult(best_move, best, self.nodes)


def negamax(board: Board, config: SearchConfig) -> SearchResult:
    """Best move, its value for the side to move, and the nodes visited."""
    return _Searcher(config).root(board)


class SearchPolicy(Policy):
    """Plays the negamax move; deterministic, no confidence vector."""

    def __init__(self, config: SearchConfig):
        self.config = config
        self.name = f"search:{config.evaluator.name}:{config.depth}"

    def choose(self, board: Board) -> Move:
        return negamax(board, self.config).move
