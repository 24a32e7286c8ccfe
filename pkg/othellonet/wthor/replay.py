"""
WThor Game Replay

Replays parsed records from the initial position, inserting forced passes,
and collects the (board, mover, move) decisions the dataset is built from.

Usage:
    from othellonet.wthor import load_corpus

    corpus = load_corpus("data/wthor", n_jobs=4)
    print(corpus.summary())
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed
from tqdm import tqdm

from othellonet.core import (
    Board,
    GameOutcome,
    Player,
    apply_move,
    flip_mask,
    initial_board,
    is_terminal,
    legal_move_mask,
    outcome,
    popcount,
)
from othellonet.wthor.reader import (
    MOVES_PER_RECORD,
    GameRecord,
    IllegalRecordedMove,
    SystematicReplayFailure,
    WthorError,
    WthorHeader,
    parse_wtb,
)

logger = logging.getLogger(__name__)

# share of records allowed to fail replay before the corpus is rejected
MAX_EXCLUDED_SHARE = 0.01


@dataclass(frozen=True)
class Decision:
    board: Board
    mover: Player
    move: int


@dataclass
class ReplayedGame:
    decisions: List[Decision]
    final_board: Board
    # None when the record stops before the game is over
    outcome: Optional[GameOutcome]
    source: str = ""
    game_id: int = 0
    real_score: int = 0

    @property
    def moves(self) -> List[int]:
        return [d.move for d in self.decisions]


def replay(record: GameRecord, source: str = "") -> ReplayedGame:
    """Replay a record; raises IllegalRecordedMove on the first illegal move."""
    board = initial_board()
    decisions: List[Decision] = []
    # MalformedMoveByte propagates; callers exclude the game like an illegal move
    cells = record.decoded_moves()

    for ply, cell in enumerate(cells[:MOVES_PER_RECORD]):
        if not legal_move_mask(board):
            if is_terminal(board):
                raise IllegalRecordedMove(record.game_id, ply, cell, "game already over")
            board = board.passed()
        if not flip_mask(board.mover, board.opponent, cell):
            raise IllegalRecordedMove(record.game_id, ply, cell)
        decisions.append(Decision(board, board.to_move, cell))
        board = apply_move(board, cell)

    final = outcome(board) if is_terminal(board) else None
    return ReplayedGame(
        decisions=decisions,
        final_board=board,
        outcome=final,
        source=source,
        game_id=record.game_id,
        real_score=record.real_score,
    )


def black_score(board: Board) -> int:
    """Final black disc count with empty squares awarded to the winner."""
    black, white = popcount(board.black), popcount(board.white)
    empties = 64 - black - white
    if black > white:
        return black + empties
    if white > black:
        return black
    return black + empties // 2


def score_matches(game: ReplayedGame) -> bool:
    return black_score(game.final_board) == game.real_score


@dataclass
class FileReplay:
    path: str
    header: WthorHeader
    games: List[ReplayedGame]
    excluded: List[Tuple[int, str]]


@dataclass
class Corpus:
    games: List[ReplayedGame] = field(default_factory=list)
    # (file, game id, reason) for every record that failed replay
    excluded: List[Tuple[str, int, str]] = field(default_factory=list)
    files: List[str] = field(default_factory=list)

    @property
    def record_count(self) -> int:
        return len(self.games) + len(self.excluded)

    @property
    def decision_count(self) -> int:
        return sum(len(g.decisions) for g in self.games)

    def score_residuals(self) -> List[ReplayedGame]:
        return [g for g in self.games if not score_matches(g)]

    def summary(self) -> dict:
        residuals = self.score_residuals()
        total = max(len(self.games), 1)
        return {
            "files": len(self.files),
            "records": self.record_count,
            "replayed": len(self.games),
            "excluded": len(self.excluded),
            "decisions": self.decision_count,
            "score_matches": len(self.games) - len(residuals),
            "score_match_rate": 100.0 * (len(self.games) - len(residuals)) / total,
        }


def replay_file(path: Union[str, Path]) -> FileReplay:
    path = Path(path)
    header, records = parse_wtb(path.read_bytes())
    games, excluded = [], []
    for record in records:
        try:
            games.append(replay(record, source=path.name))
        except WthorError as e:
            excluded.append((record.game_id, str(e)))
    return FileReplay(str(path), header, games, excluded)


def replay_records(records: Iterable[GameRecord], source: str = "") -> Corpus:
    corpus = Corpus(files=[source] if source else [])
    for record in records:
        try:
            corpus.games.append(replay(record, source=source))
        except WthorError as e:
            corpus.excluded.append((source, record.game_id, str(e)))
    return corpus


def load_corpus(
    paths: Union[str, Path, Sequence[Union[str, Path]]],
    n_jobs: int = 1,
    show_progress: bool = True,
    max_excluded_share: float = MAX_EXCLUDED_SHARE,
) -> Corpus:
    """
    Parse and replay `.wtb` files.

    Args:
        paths: A directory (all `*.wtb` inside) or a list of files.
        n_jobs: Parallel workers; results are concatenated in filename order.
        show_progress: Show a tqdm bar over files.
        max_excluded_share: Largest tolerated share of records that fail replay.

    Returns:
        Corpus with replayed games and the exclusion ledger.

    Raises:
        SystematicReplayFailure: Every record, or more than `max_excluded_share`
            of them, failed replay.
    """
    if isinstance(paths, (str, Path)) and Path(paths).is_dir():
        files = sorted(
            (p for p in Path(paths).iterdir() if p.is_file() and p.suffix.lower() == ".wtb"),
            key=lambda p: (p.name.lower(), p.name),
        )
    elif isinstance(paths, (str, Path)):
        files = [Path(paths)]
    else:
        files = sorted((Path(p) for p in paths), key=lambda p: p.name.lower())

    if not files:
        raise FileNotFoundError(f"No .wtb files found in {paths}")

    logger.info(f"Replaying {len(files)} WThor file(s) with n_jobs={n_jobs}")
    iterator = tqdm(files, desc="wthor", disable=not show_progress)
    results = Parallel(n_jobs=n_jobs)(delayed(replay_file)(f) for f in iterator)

    corpus = Corpus()
    for result in results:
        corpus.files.append(result.path)
        corpus.games.extend(result.games)
        corpus.excluded.extend((Path(result.path).name, gid, reason) for gid, reason in result.excluded)
        if result.excluded:
            logger.warning(f"{result.path}: {len(result.excluded)} game(s) excluded after failed replay")

    summary = corpus.summary()
    logger.info(
        f"Corpus: {summary['replayed']} games replayed, {summary['excluded']} excluded, "
        f"{summary['decisions']} decisions"
    )
    if corpus.excluded and (
        not corpus.games or len(corpus.excluded) > max_excluded_share * corpus.record_count
    ):
        raise SystematicReplayFailure(len(corpus.excluded), corpus.record_count, corpus.excluded[0][2])
    residuals = corpus.score_residuals()
    if residuals:
        logger.warning(
            f"{len(residuals)} game(s) disagree with the recorded black score "
            f"({summary['score_match_rate']:.2f}% match)"
        )
        for game in residuals[:20]:
            logger.debug(
                f"  {game.source}#{game.game_id}: recorded {game.real_score}, "
                f"replayed {black_score(game.final_board)}"
            )
    return corpus


def validate(
    paths: Union[str, Path, Sequence[Union[str, Path]]],
    n_jobs: int = 1,
    max_excluded_share: float = MAX_EXCLUDED_SHARE,
) -> dict:
    """Replay-legality and score-check summary for a set of `.wtb` files."""
    corpus = load_corpus(paths, n_jobs=n_jobs, show_progress=False, max_excluded_share=max_excluded_share)
    summary = corpus.summary()
    summary["replay_legal_rate"] = 100.0 * summary["replayed"] / max(summary["records"], 1)
    return summary
