"""
Seeded synthetic WThor fixture.

Games are random legal play under the naive oracle, so the expected
counts (games, decisions, passes, scores) come from code that shares
nothing with the engine under test.
"""

import random
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from tests import naive_othello as naive

FIXTURE_SEED = 20240601
FIXTURE_GAMES = 100
MIN_PASS_GAMES = 5


@dataclass
class FixtureGame:
    moves: List[int]
    passes: int
    black_score: int
    finished: bool


def random_game(rng: random.Random, max_moves: int = 60) -> FixtureGame:
    squares, colour = naive.initial()
    moves, passes = [], 0
    while len(moves) < max_moves:
        legal = naive.legal_moves(squares, colour)
        if not legal:
            if not naive.legal_moves(squares, naive.other(colour)):
                break
            passes += 1
            colour = naive.other(colour)
            continue
        move = rng.choice(legal)
        squares = naive.play(squares, colour, move)
        moves.append(move)
        colour = naive.other(colour)
    return FixtureGame(moves, passes, naive.black_score(squares), naive.is_over(squares))


def random_position(rng: random.Random, plies: int) -> Tuple[List[int], int]:
    """Position after up to `plies` random moves (stops early at game end)."""
    squares, colour = naive.initial()
    for _ in range(plies):
        legal = naive.legal_moves(squares, colour)
        if not legal:
            if not naive.legal_moves(squares, naive.other(colour)):
                break
            colour = naive.other(colour)
            continue
        squares = naive.play(squares, colour, rng.choice(legal))
        colour = naive.other(colour)
    return squares, colour


def fixture_games(count: int = FIXTURE_GAMES, seed: int = FIXTURE_SEED, min_pass_games: int = MIN_PASS_GAMES) -> List[FixtureGame]:
    """`count` complete games, at least `min_pass_games` of them with a forced pass."""
    rng = random.Random(seed)
    games: List[FixtureGame] = []
    with_pass: List[FixtureGame] = []
    while len(games) < count or len(with_pass) < min_pass_games:
        game = random_game(rng)
        if game.passes:
            with_pass.append(game)
        games.append(game)
        if len(games) > count:
            # drop the oldest game without a pass to make room
            for i, g in enumerate(games):
                if not g.passes:
                    del games[i]
                    break
            else:
                games.pop(0)
    return games[:count]


def fixture_wtb(games: List[FixtureGame]) -> bytes:
    from othellonet.wthor import build_wtb, record_from_moves

    records = [
        record_from_moves(g.moves, real_score=g.black_score, tournament_id=1, black_player_id=i, white_player_id=i + 1)
        for i, g in enumerate(games)
    ]
    return build_wtb(records, game_year=2024)


def write_fixture(directory: Path, games: List[FixtureGame] = None, name: str = "FIXTURE2024.wtb") -> Path:
    games = fixture_games() if games is None else games
    path = Path(directory) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(fixture_wtb(games))
    return path


def teacher_triples(teacher, count: int, seed: int, explore: float = 0.25, plies: int = 6):
    """
    Decisions of a deterministic `teacher` from `count` seeded openings.

    A fraction `explore` of plies is a random legal move that is played but not
    recorded, so positions vary while every label stays a function of its board.
    """
    from othellonet.core import apply_move, canonicalize, is_terminal, legal_moves
    from othellonet.dataset import Triple, TripleSet
    from othellonet.harness import generate_openings

    rng = random.Random(seed)
    triples = []
    for board in generate_openings(seed=seed, count=count, plies=plies).boards():
        while not is_terminal(board):
            moves = legal_moves(board)
            if not moves:
                board = board.passed()
                continue
            if rng.random() < explore:
                move = rng.choice(moves)
            else:
                move = teacher.choose(board)
                triples.append(Triple(canonicalize(board), move))
            board = apply_move(board, move)
    return TripleSet.from_triples(triples)
