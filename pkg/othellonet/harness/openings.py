"""
Opening positions for paired-game tournaments.

An opening is a move sequence from the initial position; the set stores the
sequences so every position can be replayed. Text format: one opening per
line, moves in a1-style coordinates separated by spaces.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from othellonet.core import Board, IllegalMove, apply_move, cell_name, initial_board, legal_moves, parse_cell
from othellonet.harness.errors import InsufficientPositions, InvalidOpening

logger = logging.getLogger(__name__)

DEFAULT_COUNT = 1000
DEFAULT_PLIES = 6
# exhaustive distinct-position counting is only attempted this deep
_MAX_ENUMERATION_PLIES = 8
_MAX_ATTEMPTS_PER_OPENING = 1000


@dataclass(frozen=True)
class Opening:
    moves: Tuple[int, ...]
    board: Board

    def to_text(self) -> str:
        return " ".join(cell_name(m) for m in self.moves)


@dataclass
class OpeningSet:
    openings: List[Opening]
    plies: int
    seed: Optional[int] = None
    source: str = "generated"

    def __len__(self) -> int:
        return len(self.openings)

    def __iter__(self):
        return iter(self.openings)

    def __getitem__(self, index: int) -> Opening:
        return self.openings[index]

    def boards(self) -> List[Board]:
        return [o.board for o in self.openings]

    def subset(self, count: int) -> "OpeningSet":
        return OpeningSet(self.openings[:count], self.plies, self.seed, self.source)


def _key(board: Board) -> Tuple[int, int, int]:
    return (board.black, board.white, board.to_move.value)


def count_distinct_positions(plies: int) -> int:
    """Distinct positions reachable in exactly `plies` moves without passes."""
    frontier: Set[Board] = {initial_board()}
    for _ in range(plies):
        frontier = {apply_move(b, m) for b in frontier for m in legal_moves(b)}
    return sum(1 for b in frontier if legal_moves(b))


def replay_opening(moves: Sequence[int]) -> Board:
    board = initial_board()
    for ply, move in enumerate(moves):
        if not legal_moves(board):
            raise InvalidOpening(f"Opening needs a pass before ply {ply + 1}")
        try:
            board = apply_move(board, move)
        except IllegalMove as e:
            raise InvalidOpening(f"Ply {ply + 1} ({cell_name(move)}): {e}") from e
    return board


def generate_openings(seed: int = 0, count: int = DEFAULT_COUNT, plies: int = DEFAULT_PLIES) -> OpeningSet:
    """
    Sample `count` distinct positions by seeded uniform random play.

    Sequences that would need a pass, and positions where the side to move
    has no legal move, are rejected.
    """
    if count < 1 or plies < 0:
        raise ValueError("count must be >= 1 and plies >= 0")
    if plies <= _MAX_ENUMERATION_PLIES:
        available = count_distinct_positions(plies)
        if count > available:
            raise InsufficientPositions(f"Only {available} distinct positions exist at {plies} plies, asked for {count}")

    rng = np.random.default_rng(seed)
    seen: Set[Tuple[int, int, int]] = set()
    openings: List[Opening] = []
    attempts = 0
    while len(openings) < count:
        attempts += 1
        if attempts > count * _MAX_ATTEMPTS_PER_OPENING:
            raise InsufficientPositions(f"Found {len(openings)} of {count} distinct openings after {attempts} attempts")
        board, moves = initial_board(), []
        for _ in range(plies):
            legal = legal_moves(board)
            if not legal:
                break
            move = legal[int(rng.integers(len(legal)))]
            moves.append(move)
            board = apply_move(board, move)
        if len(moves) != plies or not legal_moves(board):
            continue
        key = _key(board)
        if key in seen:
            continue
        seen.add(key)
        openings.append(Opening(tuple(moves), board))

    logger.info(f"Generated {count} distinct {plies}-ply openings (seed {seed}, {attempts} samples)")
    return OpeningSet(openings, plies, seed)


def save_openings(openings: OpeningSet, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(o.to_text() + "\n" for o in openings))


def load_openings(path: Union[str, Path]) -> OpeningSet:
    """Read an opening file; every line must replay legally and be distinct."""
    path = Path(path)
    openings, seen, plies = [], set(), None
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            moves = tuple(parse_cell(tok) for tok in line.split())
        except ValueError as e:
            raise InvalidOpening(f"{path}:{line_no}: {e}") from e
        board = replay_opening(moves)
        if _key(board) in seen:
            raise InvalidOpening(f"{path}:{line_no}: duplicate opening position")
        seen.add(_key(board))
        plies = len(moves) if plies is None else plies
        if len(moves) != plies:
            raise InvalidOpening(f"{path}:{line_no}: {len(moves)} plies, expected {plies}")
        openings.append(Opening(moves, board))
    if not openings:
        raise InvalidOpening(f"{path} holds no openings")
    logger.info(f"Loaded {len(openings)} openings from {path}")
    return OpeningSet(openings, plies, None, source=str(path))


def resolve_openings(spec: str, count: int = DEFAULT_COUNT, plies: int = DEFAULT_PLIES) -> OpeningSet:
    """An integer seed generates a set; anything else is read as a file path."""
    if spec.lstrip("-").isdigit():
        return generate_openings(int(spec), count, plies)
    return load_openings(spec).subset(count)
