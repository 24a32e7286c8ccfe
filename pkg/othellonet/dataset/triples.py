"""
Training triples and the four dataset variants.

A TripleSet is three parallel numpy arrays: mover mask, opponent mask and
target cell. Colour is absorbed by canonicalization, so (mover, opponent)
is always seen from the side to move.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from othellonet.core import CENTER_CELLS, Board, CanonicalBoard, Symmetry, canonicalize
from othellonet.dataset import bitboards

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Triple:
    canonical: CanonicalBoard
    target: int

    def __post_init__(self):
        if self.target in CENTER_CELLS:
            raise ValueError("A target can never be a center cell")


class DatasetVariant(Enum):
    ORIGINAL = "original"
    UNIQUE = "unique"
    ORIGINAL_S = "original-s"
    UNIQUE_S = "unique-s"

    @property
    def unique(self) -> bool:
        return self in (DatasetVariant.UNIQUE, DatasetVariant.UNIQUE_S)

    @property
    def symmetric(self) -> bool:
        return self in (DatasetVariant.ORIGINAL_S, DatasetVariant.UNIQUE_S)


class TripleSet:
    """Columnar collection of triples; all operations return new sets."""

    def __init__(self, mover: np.ndarray, opponent: np.ndarray, target: np.ndarray):
        self.mover = np.asarray(mover, dtype=np.uint64).reshape(-1)
        self.opponent = np.asarray(opponent, dtype=np.uint64).reshape(-1)
        self.target = np.asarray(target, dtype=np.uint8).reshape(-1)
        if not (len(self.mover) == len(self.opponent) == len(self.target)):
            raise ValueError("Column lengths differ")
        if np.any(self.mover & self.opponent):
            raise ValueError("Mover and opponent masks overlap")

    @classmethod
    def empty(cls) -> "TripleSet":
        return cls(np.zeros(0, np.uint64), np.zeros(0, np.uint64), np.zeros(0, np.uint8))

    @classmethod
    def from_triples(cls, triples: Sequence[Triple]) -> "TripleSet":
        if not triples:
            return cls.empty()
        return cls(
            bitboards.as_masks(t.canonical.mover for t in triples),
            bitboards.as_masks(t.canonical.opponent for t in triples),
            np.fromiter((t.target for t in triples), dtype=np.uint8),
        )

    @classmethod
    def concat(cls, parts: Sequence["TripleSet"]) -> "TripleSet":
        if not parts:
            return cls.empty()
        return cls(
            np.concatenate([p.mover for p in parts]),
            np.concatenate([p.opponent for p in parts]),
            np.concatenate([p.target for p in parts]),
        )

    def __len__(self) -> int:
        return len(self.target)

    def __iter__(self) -> Iterator[Triple]:
        for m, o, t in zip(self.mover, self.opponent, self.target):
            yield Triple(CanonicalBoard(int(m), int(o)), int(t))

    def __getitem__(self, index) -> "TripleSet":
        if isinstance(index, (int, np.integer)):
            index = [index]
        return TripleSet(self.mover[index], self.opponent[index], self.target[index])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TripleSet):
            return NotImplemented
        return (
            np.array_equal(self.mover, other.mover)
            and np.array_equal(self.opponent, other.opponent)
            and np.array_equal(self.target, other.target)
        )

    def __repr__(self) -> str:
        return f"TripleSet(n={len(self)})"

    def boards(self) -> List[Board]:
        """Full boards with the mover playing Black."""
        return [CanonicalBoard(int(m), int(o)).to_board() for m, o in zip(self.mover, self.opponent)]

    def move_numbers(self) -> np.ndarray:
        return bitboards.popcount(self.mover | self.opponent) - 3

    def legal_masks(self) -> np.ndarray:
        return bitboards.move_mask(self.mover, self.opponent)

    def targets_legal(self) -> np.ndarray:
        return (self.legal_masks() & bitboards.cell_bits(self.target)) != 0

    def transform(self, sym: Symmetry) -> "TripleSet":
        return TripleSet(
            bitboards.transform_masks(self.mover, sym),
            bitboards.transform_masks(self.opponent, sym),
            bitboards.transform_cells(self.target, sym).astype(np.uint8),
        )


def _extract_chunk(games) -> Tuple[List[int], List[int], List[int]]:
    movers, opponents, targets = [], [], []
    for game in games:
        for decision in game.decisions:
            canonical = canonicalize(decision.board)
            movers.append(canonical.mover)
            opponents.append(canonical.opponent)
            targets.append(decision.move)
    return movers, opponents, targets


def extract(games: Sequence, n_jobs: int = 1, chunk_size: int = 2000) -> TripleSet:
    """
    One triple per recorded decision, in game order.

    Replayed games never list passes, so passes produce no triple.
    Chunks are mapped in parallel and concatenated in input order.
    """
    chunks = [games[i : i + chunk_size] for i in range(0, len(games), chunk_size)]
    if not chunks:
        return TripleSet.empty()
    results = Parallel(n_jobs=n_jobs)(delayed(_extract_chunk)(c) for c in chunks)
    parts = [
        TripleSet(bitboards.as_masks(m), bitboards.as_masks(o), np.asarray(t, dtype=np.uint8))
        for m, o, t in results
    ]
    triples = TripleSet.concat(parts)
    logger.info(f"Extracted {len(triples)} triples from {len(games)} games")
    return triples


def _sort_order(data: TripleSet) -> np.ndarray:
    # lexsort keys are ordered from least to most significant
    return np.lexsort((data.target, data.opponent, data.mover))


def dedup(data: TripleSet) -> TripleSet:
    """Exact (board, target) dedup keeping first occurrences in input order."""
    if len(data) == 0:
        return data
    order = _sort_order(data)
    m, o, t = data.mover[order], data.opponent[order], data.target[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = (m[1:] != m[:-1]) | (o[1:] != o[:-1]) | (t[1:] != t[:-1])
    # a stable sort keeps the earliest index first within each run
    keep = np.sort(order[first])
    return data[keep]


def augment(data: TripleSet, unique: bool = False) -> TripleSet:
    """Expand every triple into its 8 symmetric images, contiguous per triple."""
    images = [data.transform(sym) for sym in Symmetry]
    n = len(data)
    interleave = np.arange(8 * n).reshape(8, n).T.reshape(-1)
    stacked = TripleSet.concat(images)[interleave]
    return dedup(stacked) if unique else stacked


def consistency_upper_bound(data: TripleSet) -> float:
    """Best accuracy (%) a deterministic classifier can reach on `data`."""
    n = len(data)
    if n == 0:
        return 100.0
    order = _sort_order(data)
    m, o, t = data.mover[order], data.opponent[order], data.target[order]

    new_board = np.ones(n, dtype=bool)
    new_board[1:] = (m[1:] != m[:-1]) | (o[1:] != o[:-1])
    new_pair = new_board.copy()
    new_pair[1:] |= t[1:] != t[:-1]

    pair_starts = np.flatnonzero(new_pair)
    pair_counts = np.diff(np.append(pair_starts, n))
    board_of_pair = np.cumsum(new_board)[pair_starts] - 1
    best = np.zeros(int(new_board.sum()), dtype=np.int64)
    np.maximum.at(best, board_of_pair, pair_counts)
    return 100.0 * best.sum() / n


def target_histogram(data: TripleSet) -> np.ndarray:
    return np.bincount(data.target.astype(np.int64), minlength=64)


def majority_baseline(train: TripleSet, test: Optional[TripleSet] = None) -> float:
    """Accuracy (%) on `test` of always predicting the most frequent train target."""
    test = train if test is None else test
    if len(train) == 0 or len(test) == 0:
        return 0.0
    # argmax returns the lowest cell on ties
    most_common = int(np.argmax(target_histogram(train)))
    return 100.0 * float(np.mean(test.target == most_common))


def bootstrap_sample(data: TripleSet, seed: int, size: Optional[int] = None) -> TripleSet:
    rng = np.random.default_rng(seed)
    size = len(data) if size is None else size
    return data[rng.integers(0, len(data), size=size)]


def stats(data: TripleSet) -> Dict[str, float]:
    n = len(data)
    boards = np.unique(np.stack([data.mover, data.opponent], axis=1), axis=0) if n else np.zeros((0, 2))
    move_numbers = data.move_numbers() if n else np.zeros(0, dtype=np.int64)
    return {
        "examples": n,
        "unique_triples": len(dedup(data)),
        "unique_boards": len(boards),
        "consistency_bound": consistency_upper_bound(data),
        "min_move_number": int(move_numbers.min()) if n else 0,
        "max_move_number": int(move_numbers.max()) if n else 0,
        "distinct_targets": int(np.count_nonzero(target_histogram(data))),
    }


def build_variant(
    games: Sequence,
    variant: DatasetVariant,
    split_spec=None,
    n_jobs: int = 1,
):
    """
    Build a dataset variant from replayed games.

    Returns the full variant when `split_spec` is None, otherwise a
    (train, test) pair split in `split_spec.split_order`.
    """
    from othellonet.dataset.split import SplitOrder, split

    base = extract(games, n_jobs=n_jobs)
    if variant.unique:
        base = dedup(base)
        logger.info(f"Dedup: {len(base)} unique triples")

    def finish(part: TripleSet) -> TripleSet:
        return augment(part, unique=variant.unique) if variant.symmetric else part

    if split_spec is None:
        result = finish(base)
        logger.info(f"Built {variant.value}: {len(result)} examples")
        return result

    if variant.symmetric and split_spec.split_order is SplitOrder.BEFORE_AUGMENTATION:
        train, test = split(base, split_spec)
        train, test = finish(train), finish(test)
    else:
        train, test = split(finish(base), split_spec)
    logger.info(f"Built {variant.value}: train={len(train)}, test={len(test)}")
    return train, test
