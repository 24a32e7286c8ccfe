"""
Othello Rules Engine (bitboards)

Board state is two 64-bit occupancy masks plus the side to move.
Cells are indexed row-major from a1 (0) to h8 (63): index = rank * 8 + file,
with rank 0 = "1" and file 0 = "a". Every other module uses this mapping.

Usage:
    from othellonet.core import initial_board, legal_moves, apply_move

    board = initial_board()
    for move in legal_moves(board):
        child = apply_move(board, move)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

FULL = 0xFFFFFFFFFFFFFFFF
FILE_A = 0x0101010101010101
FILE_H = 0x8080808080808080
NOT_FILE_A = FULL ^ FILE_A
NOT_FILE_H = FULL ^ FILE_H

CENTER_CELLS = (27, 28, 35, 36)  # d4, e4, d5, e5

# Move is a cell index 0..63, or PASS.
PASS = -1
Move = int


class OthelloError(Exception):
    """Base class for rules-engine errors."""


class IllegalMove(OthelloError, ValueError):
    pass


class NotTerminal(OthelloError, ValueError):
    pass


class Player(Enum):
    BLACK = 0
    WHITE = 1

    @property
    def opponent(self) -> "Player":
        return Player.WHITE if self is Player.BLACK else Player.BLACK

    @property
    def symbol(self) -> str:
        return "X" if self is Player.BLACK else "O"


class Result(Enum):
    BLACK_WIN = "black_win"
    WHITE_WIN = "white_win"
    DRAW = "draw"


@dataclass(frozen=True)
class GameOutcome:
    result: Result
    black: int
    white: int

    @property
    def black_points(self) -> float:
        """Points scored by Black: 1 for a win, 0.5 for a draw, 0 for a loss."""
        if self.result is Result.BLACK_WIN:
            return 1.0
        if self.result is Result.DRAW:
            return 0.5
        return 0.0


# Shift functions, one per direction. Masks drop bits that would wrap
# across the a/h files.
def _north(x: int) -> int:
    return (x << 8) & FULL


def _south(x: int) -> int:
    return x >> 8


def _east(x: int) -> int:
    return (x << 1) & NOT_FILE_A


def _west(x: int) -> int:
    return (x >> 1) & NOT_FILE_H


def _north_east(x: int) -> int:
    return (x << 9) & NOT_FILE_A & FULL


def _north_west(x: int) -> int:
    return (x << 7) & NOT_FILE_H & FULL


def _south_east(x: int) -> int:
    return (x >> 7) & NOT_FILE_A


def _south_west(x: int) -> int:
    return (x >> 9) & NOT_FILE_H


DIRECTIONS = (
    _north,
    _south,
    _east,
    _west,
    _north_east,
    _north_west,
    _south_east,
    _south_west,
)


def popcount(x: int) -> int:
    return bin(x).count("1")


def iter_bits(x: int):
    """Yield set bit indices in ascending order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def cell_name(cell: int) -> str:
    if cell == PASS:
        return "pass"
    return "abcdefgh"[cell % 8] + str(cell // 8 + 1)


def parse_cell(text: str) -> int:
    text = text.strip().lower()
    if text in ("pass", "--", "ps"):
        return PASS
    if len(text) != 2 or text[0] not in "abcdefgh" or text[1] not in "12345678":
        raise ValueError(f"Not a cell name: {text!r}")
    return (int(text[1]) - 1) * 8 + "abcdefgh".index(text[0])


@dataclass(frozen=True)
class Board:
    black: int
    white: int
    to_move: Player = Player.BLACK

    def __post_init__(self):
        if self.black & self.white:
            raise ValueError("Black and white masks overlap")
        if (self.black | self.white) >> 64:
            raise ValueError("Masks exceed 64 bits")

    @property
    def mover(self) -> int:
        return self.black if self.to_move is Player.BLACK else self.white

    @property
    def opponent(self) -> int:
        return self.white if self.to_move is Player.BLACK else self.black

    @property
    def occupied(self) -> int:
        return self.black | self.white

    @property
    def empty(self) -> int:
        return FULL ^ (self.black | self.white)

    @property
    def disc_count(self) -> int:
        return popcount(self.black | self.white)

    @property
    def move_number(self) -> int:
        """Number of the next move in the game (1 on the initial board)."""
        return self.disc_count - 3

    def passed(self) -> "Board":
        return Board(self.black, self.white, self.to_move.opponent)

    def swap_sides(self) -> "Board":
        """Exchange disc colours, keeping the side to move."""
        return Board(self.white, self.black, self.to_move)

    def to_text(self) -> str:
        rows = []
        for rank in range(7, -1, -1):
            row = []
            for file in range(8):
                bit = 1 << (rank * 8 + file)
                if self.black & bit:
                    row.append("X")
                elif self.white & bit:
                    row.append("O")
                else:
                    row.append("-")
            rows.append("".join(row))
        rows.append(f"{self.to_move.symbol} to move")
        return "\n".join(rows)

    @classmethod
    def from_text(cls, text: str) -> "Board":
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if len(lines) != 9 or any(len(line) != 8 for line in lines[:8]):
            raise ValueError("Board text must be 8 rows of 8 cells plus a side-to-move line")
        black = white = 0
        for row_index, line in enumerate(lines[:8]):
            rank = 7 - row_index
            for file, ch in enumerate(line):
                bit = 1 << (rank * 8 + file)
                if ch == "X":
                    black |= bit
                elif ch == "O":
                    white |= bit
                elif ch != "-":
                    raise ValueError(f"Unexpected board character {ch!r}")
        side = lines[8].split()[0]
        if side not in ("X", "O"):
            raise ValueError(f"Unexpected side-to-move line {lines[8]!r}")
        return cls(black, white, Player.BLACK if side == "X" else Player.WHITE)

    def __str__(self) -> str:
        return self.to_text()


def initial_board() -> Board:
    # black on d5 and e4, white on d4 and e5
    return Board(black=(1 << 35) | (1 << 28), white=(1 << 27) | (1 << 36), to_move=Player.BLACK)


def move_mask(mover: int, opponent: int) -> int:
    """Bitmask of cells where `mover` may place a disc."""
    empty = FULL ^ (mover | opponent)
    moves = 0
    for shift in DIRECTIONS:
        run = shift(mover) & opponent
        for _ in range(5):
            run |= shift(run) & opponent
        moves |= shift(run) & empty
    return moves


def flip_mask(mover: int, opponent: int, cell: int) -> int:
    """Discs flipped when `mover` plays at `cell`; 0 means the move is illegal."""
    placed = 1 << cell
    if (mover | opponent) & placed:
        return 0
    flips = 0
    for shift in DIRECTIONS:
        run = 0
        x = shift(placed)
        while x & opponent:
            run |= x
            x = shift(x)
        if x & mover:
            flips |= run
    return flips


def legal_move_mask(board: Board) -> int:
    return move_mask(board.mover, board.opponent)


def legal_moves(board: Board) -> Tuple[int, ...]:
    """Legal cells for the side to move, ascending. Empty means the mover must pass."""
    return tuple(iter_bits(legal_move_mask(board)))


def apply_move(board: Board, move: Move) -> Board:
    mover, opponent = board.mover, board.opponent
    if move == PASS:
        if move_mask(mover, opponent):
            raise IllegalMove("Pass while legal moves exist")
        return board.passed()
    if not 0 <= move < 64:
        raise IllegalMove(f"Cell index out of range: {move}")
    flips = flip_mask(mover, opponent, move)
    if not flips:
        raise IllegalMove(f"{cell_name(move)} flips nothing")
    mover |= flips | (1 << move)
    opponent &= ~flips
    if board.to_move is Player.BLACK:
        return Board(mover, opponent, Player.WHITE)
    return Board(opponent, mover, Player.BLACK)


def is_terminal(board: Board) -> bool:
    return not move_mask(board.black, board.white) and not move_mask(board.white, board.black)


def outcome(board: Board) -> GameOutcome:
    if not is_terminal(board):
        raise NotTerminal("Game is not over")
    black, white = popcount(board.black), popcount(board.white)
    if black > white:
        result = Result.BLACK_WIN
    elif white > black:
        result = Result.WHITE_WIN
    else:
        result = Result.DRAW
    return GameOutcome(result, black, white)
