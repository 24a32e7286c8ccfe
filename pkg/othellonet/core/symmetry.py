"""
Board symmetries and mover-perspective canonicalization.

The eight symmetries of the square form the dihedral group of order 8.
Each one is stored as a cell permutation; mask transforms relabel bits
through per-byte lookup tables so a transform costs 8 table reads per
symmetry instead of 64 bit tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Tuple

from othellonet.core.board import PASS, Board, Player


class Symmetry(Enum):
    IDENTITY = 0
    ROTATE_90 = 1
    ROTATE_180 = 2
    ROTATE_270 = 3
    FLIP_HORIZONTAL = 4  # mirror files, a <-> h
    FLIP_VERTICAL = 5  # mirror ranks, 1 <-> 8
    FLIP_DIAGONAL = 6  # a1-h8 diagonal
    FLIP_ANTI_DIAGONAL = 7  # a8-h1 diagonal


_COORD_MAPS: Dict[Symmetry, Callable[[int, int], Tuple[int, int]]] = {
    Symmetry.IDENTITY: lambda r, c: (r, c),
    Symmetry.ROTATE_90: lambda r, c: (c, 7 - r),
    Symmetry.ROTATE_180: lambda r, c: (7 - r, 7 - c),
    Symmetry.ROTATE_270: lambda r, c: (7 - c, r),
    Symmetry.FLIP_HORIZONTAL: lambda r, c: (r, 7 - c),
    Symmetry.FLIP_VERTICAL: lambda r, c: (7 - r, c),
    Symmetry.FLIP_DIAGONAL: lambda r, c: (c, r),
    Symmetry.FLIP_ANTI_DIAGONAL: lambda r, c: (7 - c, 7 - r),
}


def _build_permutation(sym: Symmetry) -> Tuple[int, ...]:
    fn = _COORD_MAPS[sym]
    perm = []
    for cell in range(64):
        r, c = fn(cell // 8, cell % 8)
        perm.append(r * 8 + c)
    return tuple(perm)


# CELL_MAPS[s][cell] = image of cell under s
CELL_MAPS: Dict[Symmetry, Tuple[int, ...]] = {s: _build_permutation(s) for s in Symmetry}


def _build_byte_tables(perm: Tuple[int, ...]) -> List[List[int]]:
    # tables[i][byte] = image mask of `byte` placed at byte position i
    tables = []
    for position in range(8):
        table = []
        for value in range(256):
            image = 0
            for bit in range(8):
                if value >> bit & 1:
                    image |= 1 << perm[position * 8 + bit]
            table.append(image)
        tables.append(table)
    return tables


_BYTE_TABLES = {s: _build_byte_tables(CELL_MAPS[s]) for s in Symmetry}


def _compose_table() -> Dict[Tuple[Symmetry, Symmetry], Symmetry]:
    by_perm = {perm: s for s, perm in CELL_MAPS.items()}
    table = {}
    for a in Symmetry:
        for b in Symmetry:
            # apply a first, then b
            perm = tuple(CELL_MAPS[b][CELL_MAPS[a][cell]] for cell in range(64))
            table[(a, b)] = by_perm[perm]
    return table


_COMPOSE = _compose_table()


def compose(first: Symmetry, then: Symmetry) -> Symmetry:
    """Symmetry equal to applying `first` and then `then`."""
    return _COMPOSE[(first, then)]


def inverse(sym: Symmetry) -> Symmetry:
    for candidate in Symmetry:
        if _COMPOSE[(sym, candidate)] is Symmetry.IDENTITY:
            return candidate
    raise AssertionError("Symmetry group is not closed")


def transform_mask(mask: int, sym: Symmetry) -> int:
    if sym is Symmetry.IDENTITY:
        return mask
    tables = _BYTE_TABLES[sym]
    out = 0
    for position in range(8):
        byte = (mask >> (position * 8)) & 0xFF
        if byte:
            out |= tables[position][byte]
    return out


def transform_cell(cell: int, sym: Symmetry) -> int:
    if cell == PASS:
        return PASS
    return CELL_MAPS[sym][cell]


def transform(board: Board, sym: Symmetry) -> Board:
    return Board(transform_mask(board.black, sym), transform_mask(board.white, sym), board.to_move)


@dataclass(frozen=True)
class CanonicalBoard:
    """Board seen from the side to move: `mover` owns the first mask."""

    mover: int
    opponent: int

    def __post_init__(self):
        if self.mover & self.opponent:
            raise ValueError("Mover and opponent masks overlap")

    def transform(self, sym: Symmetry) -> "CanonicalBoard":
        return CanonicalBoard(transform_mask(self.mover, sym), transform_mask(self.opponent, sym))

    def to_board(self) -> Board:
        """Board with the mover playing Black; rules are colour-symmetric."""
        return Board(self.mover, self.opponent, Player.BLACK)

    @property
    def move_number(self) -> int:
        return bin(self.mover | self.opponent).count("1") - 3


def canonicalize(board: Board) -> CanonicalBoard:
    return CanonicalBoard(board.mover, board.opponent)
