"""Test the command line end to end on the synthetic fixture, plus run configuration and file helpers."""

import pytest

from othellonet.cli import main
from othellonet.config import TRAIN_CONFIGS_DIR, RunConfig
from othellonet.utils.file import (
    load_config,
    read_jsonl,
    read_summary,
    read_table,
    save_summary,
    save_table,
    write_jsonl,
)
from tests.fixtures import FixtureGame, fixture_games, write_fixture


def test_perft_command(capsys):
    assert main(["perft", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["1\t4", "2\t12", "3\t56", "4\t244"]


def test_wthor_validate_command(tmp_path):
    write_fixture(tmp_path / "wthor")
    summary_path = tmp_path / "validate.txt"
    assert main(["--quiet", "--summary", str(summary_path), "wthor", "validate", str(tmp_path / "wthor")]) == 0
    summary = read_summary(summary_path)
    assert summary["records"] == "100"
    assert float(summary["replay_legal_rate"]) == 100.0


def test_build_train_evaluate_play(tmp_path):
    write_fixture(tmp_path / "wthor")
    prefix = tmp_path / "sets" / "unique"
    summary = tmp_path / "summary.txt"

    assert main(
        ["--quiet", "--summary", str(summary), "dataset", "build", "--wthor", str(tmp_path / "wthor"),
         "--variant", "unique", "--seed", "1", "--jobs", "1", "--out", str(prefix)]
    ) == 0
    built = read_summary(summary)
    assert int(built["train"]) > 0 and int(built["test"]) > 0
    train_set, test_set = f"{prefix}.train.ods", f"{prefix}.test.ods"

    assert main(["--quiet", "--summary", str(summary), "dataset", "bound", train_set]) == 0
    assert 0.0 < float(read_summary(summary)["consistency_bound"]) <= 100.0

    net = tmp_path / "net.onn"
    log = tmp_path / "net.tsv"
    assert main(
        ["--quiet", "train", "--config", "desk.yaml", "--train", train_set, "--test", test_set,
         "--width", "4", "--epochs", "1", "--out", str(net), "--log", str(log)]
    ) == 0
    assert net.exists()
    assert log.read_text().splitlines()[1] == "epoch\tlr\ttrain_loss\ttest_top1"

    assert main(["--quiet", "--summary", str(summary), "eval", "accuracy", "--policy", f"net:{net}", "--data", test_set]) == 0
    assert 0.0 <= float(read_summary(summary)["accuracy"]) <= 100.0

    grid = tmp_path / "grid.tsv"
    assert main(["--quiet", "eval", "grid", "--policy", f"net:{net}", "--data", test_set, "--out", str(grid)]) == 0
    assert grid.read_text().startswith("move_number\tlegal_moves")

    games = tmp_path / "games.tsv"
    assert main(
        ["--quiet", "--summary", str(summary), "tournament", "--a", f"net:{net}", "--b", "search:disc:1",
         "--count", "3", "--plies", "4", "--workers", "1", "--out", str(games)]
    ) == 0
    result = read_summary(summary)
    assert result["games"] == "6"
    assert "a_mean_move_seconds" not in result
    rows, headers = read_table(games)
    assert len(rows) == 3 and headers[0] == "opening"


def test_error_exit_codes(tmp_path):
    assert main(["wthor", "inspect", str(tmp_path / "missing.wtb")]) == 1
    assert main(["tournament", "--a", "walk:1", "--b", "search:disc:1", "--count", "1"]) == 2
    # 5 openings cannot be drawn from the 4 one-ply positions
    assert main(["tournament", "--a", "search:disc:1", "--b", "search:disc:1", "--count", "5", "--plies", "1"]) == 2

    # every game recorded with files written h..a fails replay
    games = [FixtureGame([c - c % 8 + 7 - c % 8 for c in g.moves], g.passes, g.black_score, g.finished)
             for g in fixture_games()]
    write_fixture(tmp_path / "mirrored", games)
    assert main(["--quiet", "wthor", "validate", str(tmp_path / "mirrored")]) == 2
    assert main(["--quiet", "dataset", "build", "--wthor", str(tmp_path / "mirrored"), "--jobs", "1",
                 "--out", str(tmp_path / "sets" / "broken")]) == 2


def test_run_config_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv("OTHELLO_WORKERS", "3")
    monkeypatch.setenv("OTHELLO_DATA_DIR", str(tmp_path))
    monkeypatch.delenv("OTHELLO_TORCH_THREADS", raising=False)
    config = RunConfig()
    assert config.workers == 3
    assert config.torch_threads == max(1, config.n_cpu // 3)
    assert config.path("wthor") == tmp_path / "wthor"
    assert RunConfig(workers=2, data_dir="elsewhere").workers == 2

    monkeypatch.setenv("OTHELLO_WORKERS", "many")
    assert RunConfig().workers == 1
    monkeypatch.setenv("OTHELLO_WORKERS", "0")
    with pytest.raises(ValueError):
        RunConfig()


def test_config_inheritance():
    config = load_config(TRAIN_CONFIGS_DIR / "desk.yaml")
    assert config.network.arch == "conv4"
    assert config.network.width == 8
    assert config.train.momentum == 0.95
    assert config.train.epochs == 4


def test_file_helpers(tmp_path):
    records = [{"opening": 0, "moves": "f5 d6"}, {"opening": 1, "moves": "c4 c3"}]
    write_jsonl(records, tmp_path / "games.jsonl")
    assert read_jsonl(tmp_path / "games.jsonl") == records

    save_table(["stage", "gain"], [["1-15", 2.5], ["16-30", -0.125]], tmp_path / "gains.tsv")
    rows, headers = read_table(tmp_path / "gains.tsv")
    assert headers == ["stage", "gain"]
    assert rows[1] == {"stage": "16-30", "gain": "-0.125"}

    save_summary({"winning_rate": 62.5, "policy_a": "net:a.onn"}, tmp_path / "summary.txt")
    assert read_summary(tmp_path / "summary.txt") == {"winning_rate": "62.5", "policy_a": "net:a.onn"}
