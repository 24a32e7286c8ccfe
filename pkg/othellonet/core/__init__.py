"""Othello rules engine: bitboards, symmetries, perspective canonicalization."""

from othellonet.core.board import (
    CENTER_CELLS,
    PASS,
    Board,
    GameOutcome,
    IllegalMove,
    Move,
    NotTerminal,
    OthelloError,
    Player,
    Result,
    apply_move,
    cell_name,
    flip_mask,
    initial_board,
    is_terminal,
    iter_bits,
    legal_move_mask,
    legal_moves,
    move_mask,
    outcome,
    parse_cell,
    popcount,
)
from othellonet.core.perft import perft
from othellonet.core.symmetry import (
    CELL_MAPS,
    CanonicalBoard,
    Symmetry,
    canonicalize,
    compose,
    inverse,
    transform,
    transform_cell,
    transform_mask,
)
