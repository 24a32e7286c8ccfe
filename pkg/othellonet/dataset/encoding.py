"""
Board encodings and the 60-way output index map.

Input planes are indexed [channel, rank, file], so plane.flat[cell] is the
value at `cell`. Channel 0 holds mover discs and channel 1 opponent discs;
the third channel depends on the scheme.
"""

from enum import Enum
from typing import Tuple

import numpy as np

from othellonet.core import CENTER_CELLS, CanonicalBoard, cell_name
from othellonet.dataset import bitboards
from othellonet.dataset.errors import CenterCell

NUM_OUTPUTS = 60


class EncodingScheme(Enum):
    PIECES = "pieces"
    VMOVES = "vmoves"
    ONES = "ones"

    @property
    def channels(self) -> int:
        return 2 if self is EncodingScheme.PIECES else 3

    @property
    def tag(self) -> int:
        return list(EncodingScheme).index(self)

    @classmethod
    def from_tag(cls, tag: int) -> "EncodingScheme":
        members = list(cls)
        if not 0 <= tag < len(members):
            raise ValueError(f"Unknown encoding tag {tag}")
        return members[tag]


# Row-major order skipping d4, e4, d5, e5
OUTPUT_CELLS: Tuple[int, ...] = tuple(c for c in range(64) if c not in CENTER_CELLS)

CELL_TO_INDEX = np.full(64, -1, dtype=np.int64)
CELL_TO_INDEX[list(OUTPUT_CELLS)] = np.arange(NUM_OUTPUTS)
INDEX_TO_CELL = np.asarray(OUTPUT_CELLS, dtype=np.int64)


def target_index(cell: int) -> int:
    if not 0 <= cell < 64:
        raise ValueError(f"Cell index out of range: {cell}")
    index = int(CELL_TO_INDEX[cell])
    if index < 0:
        raise CenterCell(f"{cell_name(cell)} is a center cell and has no output")
    return index


def index_cell(index: int) -> int:
    if not 0 <= index < NUM_OUTPUTS:
        raise ValueError(f"Output index out of range: {index}")
    return OUTPUT_CELLS[index]


def target_indices(cells: np.ndarray) -> np.ndarray:
    """Vectorised target_index; raises CenterCell if any cell is central."""
    indices = CELL_TO_INDEX[np.asarray(cells, dtype=np.int64)]
    if indices.size and indices.min() < 0:
        raise CenterCell("Dataset contains a center-cell target")
    return indices


def encode_batch(mover: np.ndarray, opponent: np.ndarray, scheme: EncodingScheme) -> np.ndarray:
    """(N,) masks -> (N, C, 8, 8) float32 planes."""
    mover = np.asarray(mover, dtype=np.uint64)
    opponent = np.asarray(opponent, dtype=np.uint64)
    n = mover.shape[0]
    planes = np.empty((n, scheme.channels, 64), dtype=np.float32)
    planes[:, 0] = bitboards.unpack(mover)
    planes[:, 1] = bitboards.unpack(opponent)
    if scheme is EncodingScheme.VMOVES:
        planes[:, 2] = bitboards.unpack(bitboards.move_mask(mover, opponent))
    elif scheme is EncodingScheme.ONES:
        planes[:, 2] = 1.0
    return planes.reshape(n, scheme.channels, 8, 8)


def encode(board: CanonicalBoard, scheme: EncodingScheme) -> np.ndarray:
    """Single board -> (C, 8, 8) float32 planes."""
    mover = np.array([board.mover], dtype=np.uint64)
    opponent = np.array([board.opponent], dtype=np.uint64)
    return encode_batch(mover, opponent, scheme)[0]
