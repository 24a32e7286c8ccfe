"""
WThor Database Reader

Bit-exact parser for `.wtb` game files:

    header (16 bytes)
        0..3    creation century, year, month, day      (1 byte each)
        4..7    record count                            (u32 LE)
        8..9    secondary record count, 0 for games     (u16 LE)
        10..11  year of the games                       (u16 LE)
        12      board size (0 or 8 = 8x8, 10 = 10x10)
        13      game type
        14      search depth of theoretical scores
        15      reserved
    record (68 bytes each)
        tournament id, black player id, white player id (u16 LE each)
        real score (black discs), theoretical score      (1 byte each)
        60 move bytes, tens = rank 1..8, units = file 1..8, 0-padded

Player/tournament name files (.jou/.trn) are not read.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import List, Optional, Tuple

from othellonet.core import cell_name

HEADER_SIZE = 16
RECORD_SIZE = 68
MOVES_PER_RECORD = 60

_HEADER = struct.Struct("<4BIHH4B")
_RECORD = struct.Struct("<3H2B60s")

# decode_move_byte result for the padding byte
END_OF_MOVES = None


class WthorError(Exception):
    """Base class for WThor ingestion errors."""


class TruncatedFile(WthorError, ValueError):
    pass


class UnsupportedBoardSize(WthorError, ValueError):
    pass


class MalformedMoveByte(WthorError, ValueError):
    pass


class IllegalRecordedMove(WthorError, ValueError):
    def __init__(self, game_id: int, ply: int, move: int, reason: str = ""):
        self.game_id = game_id
        self.ply = ply
        self.move = move
        super().__init__(
            f"Game {game_id}: recorded move {cell_name(move)} at ply {ply} is illegal"
            + (f" ({reason})" if reason else "")
        )


class SystematicReplayFailure(WthorError):
    """Too many records fail replay for the corpus to be trusted."""

    def __init__(self, excluded: int, records: int, first_reason: str = ""):
        self.excluded = excluded
        self.records = records
        super().__init__(
            f"{excluded} of {records} game(s) failed replay; the files are probably not standard 8x8 WThor"
            + (f" (first: {first_reason})" if first_reason else "")
        )


@dataclass(frozen=True)
class WthorHeader:
    created_century: int
    created_year: int
    created_month: int
    created_day: int
    record_count: int
    secondary_count: int
    game_year: int
    board_size: int
    game_type: int
    depth: int
    reserved: int

    @property
    def is_8x8(self) -> bool:
        return self.board_size in (0, 8)

    def to_bytes(self) -> bytes:
        return _HEADER.pack(
            self.created_century,
            self.created_year,
            self.created_month,
            self.created_day,
            self.record_count,
            self.secondary_count,
            self.game_year,
            self.board_size,
            self.game_type,
            self.depth,
            self.reserved,
        )


@dataclass(frozen=True)
class GameRecord:
    tournament_id: int
    black_player_id: int
    white_player_id: int
    real_score: int
    theoretical_score: int
    moves: bytes
    # position of the record in its file, used in error reports
    game_id: int = 0

    def __post_init__(self):
        if len(self.moves) != MOVES_PER_RECORD:
            raise ValueError(f"A record holds exactly {MOVES_PER_RECORD} move bytes")

    def decoded_moves(self) -> List[int]:
        """Recorded cells up to the first padding byte."""
        cells = []
        for value in self.moves:
            cell = decode_move_byte(value)
            if cell is END_OF_MOVES:
                break
            cells.append(cell)
        return cells

    def padding_is_clean(self) -> bool:
        """True when every byte after the first 0 is also 0."""
        try:
            first_zero = self.moves.index(0)
        except ValueError:
            return True
        return not any(self.moves[first_zero:])


def decode_move_byte(value: int) -> Optional[int]:
    """Map a WThor move byte to a cell index; 0 marks the end of the game."""
    if value == 0:
        return END_OF_MOVES
    rank, file = divmod(value, 10)
    if not (1 <= rank <= 8 and 1 <= file <= 8):
        raise MalformedMoveByte(f"Move byte {value} is outside the 11..88 coordinate range")
    return (rank - 1) * 8 + (file - 1)


def encode_move_byte(cell: int) -> int:
    return (cell // 8 + 1) * 10 + (cell % 8 + 1)


def encode_record(record: GameRecord) -> bytes:
    return _RECORD.pack(
        record.tournament_id,
        record.black_player_id,
        record.white_player_id,
        record.real_score,
        record.theoretical_score,
        record.moves,
    )


def record_from_moves(
    cells: List[int],
    real_score: int = 0,
    theoretical_score: int = 0,
    tournament_id: int = 0,
    black_player_id: int = 0,
    white_player_id: int = 0,
    game_id: int = 0,
) -> GameRecord:
    if len(cells) > MOVES_PER_RECORD:
        raise ValueError("A game has at most 60 moves")
    moves = bytes(encode_move_byte(c) for c in cells).ljust(MOVES_PER_RECORD, b"\x00")
    return GameRecord(
        tournament_id=tournament_id,
        black_player_id=black_player_id,
        white_player_id=white_player_id,
        real_score=real_score,
        theoretical_score=theoretical_score,
        moves=moves,
        game_id=game_id,
    )


def parse_header(data: bytes) -> WthorHeader:
    if len(data) < HEADER_SIZE:
        raise TruncatedFile(f"File has {len(data)} bytes, header needs {HEADER_SIZE}")
    return WthorHeader(*_HEADER.unpack_from(data, 0))


def parse_wtb(data: bytes) -> Tuple[WthorHeader, List[GameRecord]]:
    header = parse_header(data)
    if not header.is_8x8:
        raise UnsupportedBoardSize(f"Board size {header.board_size} is not supported")

    expected = HEADER_SIZE + RECORD_SIZE * header.record_count
    if len(data) != expected:
        raise TruncatedFile(
            f"Header announces {header.record_count} records ({expected} bytes), file has {len(data)}"
        )

    records = []
    for index in range(header.record_count):
        offset = HEADER_SIZE + index * RECORD_SIZE
        tournament, black, white, real, theoretical, moves = _RECORD.unpack_from(data, offset)
        records.append(
            GameRecord(
                tournament_id=tournament,
                black_player_id=black,
                white_player_id=white,
                real_score=real,
                theoretical_score=theoretical,
                moves=moves,
                game_id=index,
            )
        )
    return header, records


def build_wtb(records: List[GameRecord], game_year: int = 0, header: Optional[WthorHeader] = None) -> bytes:
    """Serialize records into a `.wtb` image (test fixtures and round trips)."""
    if header is None:
        header = WthorHeader(20, 24, 1, 1, len(records), 0, game_year, 8, 0, 22, 0)
    elif header.record_count != len(records):
        raise ValueError("Header record count does not match the records")
    return header.to_bytes() + b"".join(encode_record(r) for r in records)
