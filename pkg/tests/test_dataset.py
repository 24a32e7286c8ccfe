"""Test triple extraction, dedup, augmentation, encodings, splits and dataset files."""

import logging
from collections import Counter, defaultdict
from functools import lru_cache

import numpy as np
import pytest

from othellonet.core import CELL_MAPS, CanonicalBoard, Symmetry, apply_move, canonicalize, initial_board
from othellonet.dataset import (
    BadMagic,
    CenterCell,
    ChecksumMismatch,
    DatasetVariant,
    EncodingScheme,
    IllegalTarget,
    SplitOrder,
    SplitSpec,
    Triple,
    TripleSet,
    VersionMismatch,
    augment,
    bootstrap_sample,
    build_variant,
    consistency_upper_bound,
    dedup,
    encode,
    encode_batch,
    extract,
    index_cell,
    majority_baseline,
    orbit_keys,
    split,
    target_index,
)
from othellonet.dataset import storage
from othellonet.wthor import parse_wtb, replay_records
from tests import naive_othello as naive
from tests.fixtures import fixture_games, fixture_wtb


@lru_cache(maxsize=1)
def _fixture():
    games = fixture_games()
    _, records = parse_wtb(fixture_wtb(games))
    return games, replay_records(records).games


def _triples(*pairs) -> TripleSet:
    return TripleSet.from_triples([Triple(canonicalize(board), move) for board, move in pairs])


def test_extract_counts():
    games, replayed = _fixture()
    data = extract(replayed)
    assert len(data) == sum(len(g.moves) for g in games)
    assert data.targets_legal().all()
    # game order: the first triple is the first decision of the first game
    assert int(data.target[0]) == games[0].moves[0]
    assert TripleSet.concat([extract(replayed[:40]), extract(replayed[40:])]) == data


def test_extract_skips_passes():
    games, replayed = _fixture()
    index = next(i for i, g in enumerate(games) if g.passes)
    assert len(extract([replayed[index]])) == len(games[index].moves)


def test_dedup_semantics():
    board = initial_board()
    data = _triples((board, 19), (board, 19), (board, 26))
    unique = dedup(data)
    assert len(unique) == 2
    assert list(unique.target) == [19, 26]
    assert dedup(unique) == unique


def test_augment_closure():
    _, replayed = _fixture()
    data = extract(replayed[:5])
    augmented = augment(data)
    assert len(augmented) == 8 * len(data)
    assert augmented.targets_legal().all()
    rows = set(zip(augmented.mover.tolist(), augmented.opponent.tolist(), augmented.target.tolist()))
    for sym in Symmetry:
        image = augmented.transform(sym)
        assert set(zip(image.mover.tolist(), image.opponent.tolist(), image.target.tolist())) <= rows


def test_symmetric_board_collapses_in_unique_s():
    # mover holds the centre, opponent c3/f3/c6/f6: fixed by all 8 symmetries
    mover = sum(1 << c for c in (27, 28, 35, 36))
    opponent = sum(1 << c for c in (18, 21, 42, 45))
    data = TripleSet.from_triples([Triple(CanonicalBoard(mover, opponent), 9)])
    assert len(augment(data)) == 8
    unique = augment(data, unique=True)
    assert len(unique) == 4
    assert sorted(unique.target.tolist()) == [9, 14, 49, 54]


def _oracle_decisions(games):
    """(mover-relative squares, move) for every decision, replayed with the array rules."""
    decisions = []
    for game in games:
        squares, colour = naive.initial()
        for move in game.moves:
            if not naive.legal_moves(squares, colour):
                colour = naive.other(colour)
            relative = tuple(0 if s == naive.EMPTY else 1 if s == colour else 2 for s in squares)
            decisions.append((relative, move))
            squares = naive.play(squares, colour, move)
            colour = naive.other(colour)
    return decisions


@lru_cache(maxsize=1)
def _square_maps():
    maps = []
    for swap in (False, True):
        for flip_rank in (False, True):
            for flip_file in (False, True):
                cells = []
                for cell in range(64):
                    r, f = divmod(cell, 8)
                    r, f = (f, r) if swap else (r, f)
                    cells.append((7 - r if flip_rank else r) * 8 + (7 - f if flip_file else f))
                maps.append(cells)
    return maps


def _images(decision):
    squares, move = decision
    for cells in _square_maps():
        image = [0] * 64
        for cell, value in enumerate(squares):
            image[cells[cell]] = value
        yield tuple(image), cells[move]


def _bound(decisions) -> float:
    by_board = defaultdict(Counter)
    for squares, move in decisions:
        by_board[squares][move] += 1
    return 100.0 * sum(max(c.values()) for c in by_board.values()) / len(decisions)


def test_variants_from_fixture():
    games, replayed = _fixture()
    decisions = _oracle_decisions(games)
    unique_decisions = set(decisions)
    unique_images = {image for d in unique_decisions for image in _images(d)}
    all_images = [image for d in decisions for image in _images(d)]

    original = build_variant(replayed, DatasetVariant.ORIGINAL)
    unique = build_variant(replayed, DatasetVariant.UNIQUE)
    original_s = build_variant(replayed, DatasetVariant.ORIGINAL_S)
    unique_s = build_variant(replayed, DatasetVariant.UNIQUE_S)
    assert len(original) == len(decisions)
    assert len(unique) == len(unique_decisions)
    assert len(original_s) == len(all_images) == 8 * len(decisions)
    assert len(unique_s) == len(unique_images)
    assert len(dedup(unique_s)) == len(unique_s)

    assert consistency_upper_bound(original) == pytest.approx(_bound(decisions))
    assert consistency_upper_bound(unique) == pytest.approx(_bound(list(unique_decisions)))
    assert consistency_upper_bound(original_s) == pytest.approx(_bound(all_images))
    assert consistency_upper_bound(unique_s) == pytest.approx(_bound(list(unique_images)))


def test_consistency_bound():
    board = initial_board()
    assert consistency_upper_bound(TripleSet.empty()) == 100.0
    assert consistency_upper_bound(_triples((board, 19), (board, 26))) == 50.0
    other = apply_move(board, 19)
    data = _triples((board, 19), (board, 19), (board, 26), (other, 18))
    assert consistency_upper_bound(data) == 75.0
    assert consistency_upper_bound(dedup(data)) == pytest.approx(200.0 / 3.0)


def test_target_index_bijection():
    assert target_index(0) == 0
    assert target_index(63) == 59
    for center in (27, 28, 35, 36):
        with pytest.raises(CenterCell):
            target_index(center)
    cells = [c for c in range(64) if c not in (27, 28, 35, 36)]
    assert [index_cell(target_index(c)) for c in cells] == cells


def test_encodings_on_initial_board():
    canonical = canonicalize(initial_board())
    pieces = encode(canonical, EncodingScheme.PIECES)
    assert pieces.shape == (2, 8, 8)
    assert pieces[0].sum() == 2 and pieces[1].sum() == 2
    vmoves = encode(canonical, EncodingScheme.VMOVES)
    assert vmoves[2].sum() == 4
    assert vmoves[2].reshape(-1)[19] == 1.0
    ones = encode(canonical, EncodingScheme.ONES)
    assert ones[2].sum() == 64


def test_encoding_commutes_with_symmetry():
    _, replayed = _fixture()
    data = extract(replayed[:3])
    for scheme in EncodingScheme:
        planes = encode_batch(data.mover, data.opponent, scheme).reshape(len(data), scheme.channels, 64)
        for sym in Symmetry:
            image = data.transform(sym)
            moved = encode_batch(image.mover, image.opponent, scheme).reshape(len(data), scheme.channels, 64)
            expected = np.empty_like(planes)
            expected[:, :, list(CELL_MAPS[sym])] = planes
            assert np.array_equal(moved, expected)


def test_split_sizes_and_determinism():
    _, replayed = _fixture()
    data = extract(replayed)[np.arange(1000)]
    spec = SplitSpec(0.25, seed=5, split_order=SplitOrder.AFTER_AUGMENTATION)
    train, test = split(data, spec)
    assert (len(train), len(test)) == (750, 250)
    again = split(data, spec)
    assert again[0] == train and again[1] == test
    with pytest.raises(ValueError):
        SplitSpec(1.0)
    assert SplitSpec.for_variant(DatasetVariant.UNIQUE_S).test_fraction == 0.05


def test_split_before_augmentation_has_no_leakage():
    _, replayed = _fixture()
    base = dedup(extract(replayed))
    train, test = split(base, SplitSpec(0.25, seed=1))
    assert len(train) + len(test) == len(base)
    assert len(test) <= round(0.25 * len(base))
    train_s, test_s = augment(train), augment(test)
    joint = TripleSet.concat([train_s, test_s])
    keys = orbit_keys(joint)
    train_orbits = set(keys[: len(train_s)].tolist())
    test_orbits = set(keys[len(train_s) :].tolist())
    assert not train_orbits & test_orbits


def test_split_reports_orbit_undershoot(caplog):
    _, replayed = _fixture()
    data = extract(replayed)
    # three mid-game decisions, each expanded into a full orbit of 8 images
    orbits = augment(data[np.flatnonzero(data.move_numbers() >= 20)[:3]])
    assert len(orbits) == 24
    with caplog.at_level(logging.INFO, logger="othellonet.dataset.split"):
        train, test = split(orbits, SplitSpec(0.2, seed=0))
    assert (len(train), len(test)) == (24, 0)
    assert "filled 0 of 5 test examples" in caplog.text


def test_build_variant_split_before():
    _, replayed = _fixture()
    spec = SplitSpec.for_variant(DatasetVariant.UNIQUE_S, seed=3)
    train, test = build_variant(replayed, DatasetVariant.UNIQUE_S, spec)
    assert len(train) > 0 and len(test) > 0
    boards = lambda d: set(zip(d.mover.tolist(), d.opponent.tolist()))
    assert not boards(train) & boards(test)


def test_majority_baseline_and_bootstrap():
    board = initial_board()
    data = _triples((board, 19), (board, 19), (board, 26), (board, 37))
    assert majority_baseline(data) == 50.0
    sample = bootstrap_sample(data, seed=4)
    assert len(sample) == len(data)
    assert bootstrap_sample(data, seed=4) == sample


def test_storage_round_trip(tmp_path):
    _, replayed = _fixture()
    data = extract(replayed[:10])
    path = tmp_path / "ten.ods"
    storage.save(data, path, EncodingScheme.VMOVES)
    loaded, header = storage.load_with_header(path)
    assert loaded == data
    assert header.scheme is EncodingScheme.VMOVES and header.count == len(data)

    empty_path = tmp_path / "empty.ods"
    storage.save(TripleSet.empty(), empty_path)
    assert len(storage.load(empty_path)) == 0


def test_storage_errors():
    _, replayed = _fixture()
    blob = storage.to_bytes(extract(replayed[:2]))
    with pytest.raises(BadMagic):
        storage.from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ChecksumMismatch):
        storage.from_bytes(blob[:-1] + bytes([blob[-1] ^ 0xFF]))
    with pytest.raises(VersionMismatch):
        storage.from_bytes(blob[:4] + (99).to_bytes(2, "little") + blob[6:])


def test_storage_rejects_illegal_target():
    board = CanonicalBoard(initial_board().mover, initial_board().opponent)
    # a1 is an output cell but not a legal move on the initial board
    bad = TripleSet(np.array([board.mover], np.uint64), np.array([board.opponent], np.uint64), np.array([0], np.uint8))
    with pytest.raises(IllegalTarget):
        storage.from_bytes(storage.to_bytes(bad))
