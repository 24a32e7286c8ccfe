"""Move-generator verification: count leaves of the legal game tree."""

from othellonet.core.board import Board, apply_move, iter_bits, move_mask


def perft(board: Board, depth: int) -> int:
    """Leaf count at `depth` plies. A forced pass is a ply; a finished game is a leaf."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    mover, opponent = board.mover, board.opponent
    moves = move_mask(mover, opponent)
    if not moves:
        if not move_mask(opponent, mover):
            return 1
        return perft(board.passed(), depth - 1)
    if depth == 1:
        return bin(moves).count("1")
    return sum(perft(apply_move(board, cell), depth - 1) for cell in iter_bits(moves))
