#!/usr/bin/env python3
"""Test the bitboard rules engine against the naive array oracle.

Usage:
    pytest tests/test_board.py
    python -m tests.test_board --positions 100000 --perft-depth 6
"""

import argparse
import random
import sys
import time

import pytest

from othellonet.core import (
    PASS,
    Board,
    IllegalMove,
    NotTerminal,
    Player,
    Result,
    apply_move,
    cell_name,
    flip_mask,
    initial_board,
    is_terminal,
    legal_moves,
    outcome,
    parse_cell,
    perft,
    popcount,
)
from tests import naive_othello as naive
from tests.fixtures import random_position

PERFT = {1: 4, 2: 12, 3: 56, 4: 244, 5: 1396, 6: 8200}


def _board(squares, colour) -> Board:
    black, white = naive.masks(squares)
    return Board(black, white, Player.BLACK if colour == naive.BLACK else Player.WHITE)


def test_initial_position():
    board = initial_board()
    assert board.to_move is Player.BLACK
    assert popcount(board.black) == 2 and popcount(board.white) == 2
    assert legal_moves(board) == (parse_cell("d3"), parse_cell("c4"), parse_cell("f5"), parse_cell("e6"))
    assert board.move_number == 1


def test_f5_from_initial():
    board = apply_move(initial_board(), parse_cell("f5"))
    black = {cell_name(c) for c in range(64) if board.black >> c & 1}
    white = {cell_name(c) for c in range(64) if board.white >> c & 1}
    assert black == {"e4", "d5", "e5", "f5"}
    assert white == {"d4"}
    assert board.to_move is Player.WHITE


def test_illegal_moves_rejected():
    board = initial_board()
    with pytest.raises(IllegalMove):
        apply_move(board, parse_cell("a1"))
    with pytest.raises(IllegalMove):
        apply_move(board, parse_cell("d4"))
    with pytest.raises(IllegalMove):
        apply_move(board, PASS)
    with pytest.raises(IllegalMove):
        apply_move(board, 64)


def test_pass_only_when_forced():
    # black to move has nothing; white can still play c7
    board = Board.from_text(
        """
        --------
        OX------
        --------
        --------
        --------
        --------
        --------
        --------
        X to move
        """
    )
    assert legal_moves(board) == ()
    assert not is_terminal(board)
    after = apply_move(board, PASS)
    assert after.to_move is Player.WHITE
    assert after.black == board.black and after.white == board.white


def test_outcome_requires_terminal():
    with pytest.raises(NotTerminal):
        outcome(initial_board())
    full_black = Board((1 << 64) - 1, 0)
    result = outcome(full_black)
    assert result.result is Result.BLACK_WIN and result.black == 64 and result.black_points == 1.0


def test_text_round_trip():
    board = apply_move(apply_move(initial_board(), 19), 18)
    text = board.to_text()
    assert text.splitlines()[-1] == "X to move"
    assert Board.from_text(text) == board


def test_cell_names():
    assert cell_name(0) == "a1" and cell_name(63) == "h8" and cell_name(PASS) == "pass"
    for cell in range(64):
        assert parse_cell(cell_name(cell)) == cell


def test_perft_values(max_depth: int = 5):
    board = initial_board()
    for depth in range(1, max_depth + 1):
        assert perft(board, depth) == PERFT[depth]


def test_perft_matches_naive(max_depth: int = 4):
    squares, colour = naive.initial()
    for depth in range(1, max_depth + 1):
        assert perft(initial_board(), depth) == naive.perft(squares, colour, depth)


def test_moves_match_naive(positions: int = 2000, seed: int = 7):
    """Legal sets, flips and successor boards agree on random reachable positions."""
    rng = random.Random(seed)
    for _ in range(positions):
        squares, colour = random_position(rng, rng.randint(0, 60))
        board = _board(squares, colour)
        expected = naive.legal_moves(squares, colour)
        assert list(legal_moves(board)) == expected

        for move in expected:
            flipped = naive.flips(squares, colour, move)
            assert flip_mask(board.mover, board.opponent, move) == sum(1 << c for c in flipped)
            after = apply_move(board, move)
            assert after == _board(naive.play(squares, colour, move), naive.other(colour))
            assert after.disc_count == board.disc_count + 1


def run_oracle(positions: int, perft_depth: int, seed: int) -> bool:
    print("Testing bitboard rules against the naive oracle...")
    start = time.perf_counter()
    try:
        test_moves_match_naive(positions, seed)
        print(f"  [OK] {positions} random positions agree")
        for depth in range(1, perft_depth + 1):
            count = perft(initial_board(), depth)
            assert count == PERFT[depth], f"perft({depth}) = {count}, expected {PERFT[depth]}"
            print(f"  [OK] perft({depth}) = {count}")
    except AssertionError as e:
        print(f"  [FAIL] {e}")
        return False
    print(f"  Time: {time.perf_counter() - start:.1f}s")
    return True


def main():
    parser = argparse.ArgumentParser(description="Rules engine oracle check")
    parser.add_argument("--positions", type=int, default=100_000)
    parser.add_argument("--perft-depth", type=int, default=6, choices=range(1, 7))
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    return 0 if run_oracle(args.positions, args.perft_depth, args.seed) else 1


if __name__ == "__main__":
    sys.exit(main())
