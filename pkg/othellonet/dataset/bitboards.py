"""
Vectorised bitboard helpers over numpy uint64 arrays.

Every mask array is 1-D `np.uint64`; bit i is cell i in the shared
row-major a1=0 indexing. Shift amounts and masks are np.uint64 so numpy
never promotes to float.
"""

from typing import Iterable

import numpy as np

from othellonet.core import CELL_MAPS, Symmetry

_U = np.uint64
FULL = _U(0xFFFFFFFFFFFFFFFF)
NOT_FILE_A = _U(0xFEFEFEFEFEFEFEFE)
NOT_FILE_H = _U(0x7F7F7F7F7F7F7F7F)

_ONE, _SEVEN, _EIGHT, _NINE = _U(1), _U(7), _U(8), _U(9)

_DIRECTIONS = (
    lambda x: x << _EIGHT,
    lambda x: x >> _EIGHT,
    lambda x: (x << _ONE) & NOT_FILE_A,
    lambda x: (x >> _ONE) & NOT_FILE_H,
    lambda x: (x << _NINE) & NOT_FILE_A,
    lambda x: (x << _SEVEN) & NOT_FILE_H,
    lambda x: (x >> _SEVEN) & NOT_FILE_A,
    lambda x: (x >> _NINE) & NOT_FILE_H,
)

_PERMUTATIONS = {s: np.asarray(CELL_MAPS[s], dtype=np.int64) for s in Symmetry}


def as_masks(values: Iterable[int]) -> np.ndarray:
    return np.fromiter((int(v) for v in values), dtype=np.uint64)


def unpack(masks: np.ndarray) -> np.ndarray:
    """(N,) uint64 -> (N, 64) uint8 bits in cell order."""
    masks = np.ascontiguousarray(masks, dtype="<u8")
    as_bytes = masks.view(np.uint8).reshape(-1, 8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")


def pack(bits: np.ndarray) -> np.ndarray:
    """(N, 64) bits -> (N,) uint64."""
    packed = np.packbits(np.ascontiguousarray(bits, dtype=np.uint8), axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(-1).astype(np.uint64)


def popcount(masks: np.ndarray) -> np.ndarray:
    return unpack(masks).sum(axis=1, dtype=np.int64)


def move_mask(mover: np.ndarray, opponent: np.ndarray) -> np.ndarray:
    empty = ~(mover | opponent)
    moves = np.zeros_like(mover)
    for shift in _DIRECTIONS:
        run = shift(mover) & opponent
        for _ in range(5):
            run |= shift(run) & opponent
        moves |= shift(run) & empty
    return moves


def cell_bits(cells: np.ndarray) -> np.ndarray:
    return np.left_shift(_ONE, np.asarray(cells, dtype=np.uint64))


def transform_masks(masks: np.ndarray, sym: Symmetry) -> np.ndarray:
    if sym is Symmetry.IDENTITY:
        return np.array(masks, dtype=np.uint64)
    bits = unpack(masks)
    out = np.empty_like(bits)
    out[:, _PERMUTATIONS[sym]] = bits
    return pack(out)


def transform_cells(cells: np.ndarray, sym: Symmetry) -> np.ndarray:
    return _PERMUTATIONS[sym][np.asarray(cells, dtype=np.int64)]
