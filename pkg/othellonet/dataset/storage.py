"""
Dataset file format (little-endian):

    magic     4 bytes  b"ODS1"
    version   u16
    scheme    u8       EncodingScheme tag the set is meant to be encoded with
    count     u64
    examples  count x (mover u64, opponent u64, target index u8)
    checksum  u32      crc32 of every preceding byte

Planes are re-derived from masks on load.
"""

import logging
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from othellonet.dataset.encoding import INDEX_TO_CELL, NUM_OUTPUTS, EncodingScheme, target_indices
from othellonet.dataset.errors import BadMagic, ChecksumMismatch, IllegalTarget, VersionMismatch
from othellonet.dataset.triples import TripleSet

logger = logging.getLogger(__name__)

MAGIC = b"ODS1"
VERSION = 1

_HEADER = struct.Struct("<4sHBQ")
_TRAILER = struct.Struct("<I")
_EXAMPLE = np.dtype([("mover", "<u8"), ("opponent", "<u8"), ("target", "u1")])


@dataclass(frozen=True)
class DatasetHeader:
    version: int
    scheme: EncodingScheme
    count: int


def to_bytes(data: TripleSet, scheme: EncodingScheme = EncodingScheme.PIECES) -> bytes:
    records = np.empty(len(data), dtype=_EXAMPLE)
    records["mover"] = data.mover
    records["opponent"] = data.opponent
    records["target"] = target_indices(data.target)
    body = _HEADER.pack(MAGIC, VERSION, scheme.tag, len(data)) + records.tobytes()
    return body + _TRAILER.pack(zlib.crc32(body))


def from_bytes(blob: bytes) -> Tuple[TripleSet, DatasetHeader]:
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise BadMagic(f"Not a dataset file (magic {blob[:4]!r})")
    if len(blob) < _HEADER.size + _TRAILER.size:
        raise ChecksumMismatch("Dataset file is truncated")
    _, version, tag, count = _HEADER.unpack_from(blob, 0)
    if version != VERSION:
        raise VersionMismatch(f"Dataset version {version}, expected {VERSION}")

    body, (stored_crc,) = blob[: -_TRAILER.size], _TRAILER.unpack(blob[-_TRAILER.size :])
    if zlib.crc32(body) != stored_crc:
        raise ChecksumMismatch("Dataset checksum does not match its contents")
    if len(body) != _HEADER.size + count * _EXAMPLE.itemsize:
        raise ChecksumMismatch(f"Header announces {count} examples but the body size disagrees")

    records = np.frombuffer(body, dtype=_EXAMPLE, count=count, offset=_HEADER.size)
    if count and records["target"].max() >= NUM_OUTPUTS:
        raise IllegalTarget("Stored target index exceeds the output space")
    data = TripleSet(
        records["mover"].astype(np.uint64),
        records["opponent"].astype(np.uint64),
        INDEX_TO_CELL[records["target"].astype(np.int64)].astype(np.uint8),
    )

    legal = data.targets_legal()
    if not legal.all():
        first = int(np.flatnonzero(~legal)[0])
        raise IllegalTarget(f"Example {first} stores a target that is not a legal move")
    return data, DatasetHeader(version, EncodingScheme.from_tag(tag), count)


def save(data: TripleSet, path: Union[str, Path], scheme: EncodingScheme = EncodingScheme.PIECES) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(to_bytes(data, scheme))
    logger.info(f"Saved {len(data)} examples to {path}")


def load_with_header(path: Union[str, Path]) -> Tuple[TripleSet, DatasetHeader]:
    return from_bytes(Path(path).read_bytes())


def load(path: Union[str, Path]) -> TripleSet:
    data, header = load_with_header(path)
    logger.info(f"Loaded {header.count} examples from {path} (scheme {header.scheme.value})")
    return data
