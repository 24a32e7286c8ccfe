"""Single games and opening pairs between two policies."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from othellonet.core import PASS, Board, GameOutcome, Move, Player, apply_move, cell_name, is_terminal, legal_moves, outcome
from othellonet.harness.errors import PolicyFault
from othellonet.policy import Policy


@dataclass
class Transcript:
    start: Board
    moves: List[Move]
    outcome: GameOutcome
    # wall-clock seconds per decision, keyed by colour
    times: Dict[Player, List[float]] = field(default_factory=dict)

    def to_text(self) -> str:
        return " ".join(cell_name(m) for m in self.moves)

    def replay(self) -> Board:
        board = self.start
        for move in self.moves:
            board = apply_move(board, move)
        return board


def play_game(black: Policy, white: Policy, start: Board) -> Tuple[float, Transcript]:
    """
    Play to the end with auto-pass. Returns Black's points (1, 0.5 or 0)
    and the transcript, passes included.
    """
    board = start
    moves: List[Move] = []
    times: Dict[Player, List[float]] = {Player.BLACK: [], Player.WHITE: []}
    while not is_terminal(board):
        legal = legal_moves(board)
        if not legal:
            moves.append(PASS)
            board = board.passed()
            continue
        policy = black if board.to_move is Player.BLACK else white
        started = time.perf_counter()
        move = policy.choose(board)
        times[board.to_move].append(time.perf_counter() - started)
        if move not in legal:
            raise PolicyFault(f"{policy.name} chose {cell_name(move)}, legal moves are {[cell_name(m) for m in legal]}")
        moves.append(move)
        board = apply_move(board, move)
    result = outcome(board)
    return result.black_points, Transcript(start, moves, result, times)


@dataclass
class MatchResult:
    """Both games from one opening; points are those of the first policy."""

    opening_id: int
    points_as_black: float
    points_as_white: float
    game_as_black: Transcript
    game_as_white: Transcript

    @property
    def total(self) -> float:
        return self.points_as_black + self.points_as_white


def play_pair(a: Policy, b: Policy, start: Board, opening_id: int = 0) -> MatchResult:
    black_points, first = play_game(a, b, start)
    other_black_points, second = play_game(b, a, start)
    return MatchResult(opening_id, black_points, 1.0 - other_black_points, first, second)
