"""WThor `.wtb` ingestion: binary parsing and replay-based validation."""

from othellonet.wthor.reader import (
    END_OF_MOVES,
    HEADER_SIZE,
    MOVES_PER_RECORD,
    RECORD_SIZE,
    GameRecord,
    IllegalRecordedMove,
    MalformedMoveByte,
    SystematicReplayFailure,
    TruncatedFile,
    UnsupportedBoardSize,
    WthorError,
    WthorHeader,
    build_wtb,
    decode_move_byte,
    encode_move_byte,
    encode_record,
    parse_header,
    parse_wtb,
    record_from_moves,
)
from othellonet.wthor.replay import (
    MAX_EXCLUDED_SHARE,
    Corpus,
    Decision,
    ReplayedGame,
    black_score,
    load_corpus,
    replay,
    replay_file,
    replay_records,
    score_matches,
    validate,
)
