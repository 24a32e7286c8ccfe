#!/usr/bin/env python3
"""
othellonet: learn Othello move predictors from expert games and measure them.

Commands:
    wthor inspect FILE            header fields and the first games as text
    wthor validate PATH...        replay legality and score-check summary
    dataset build                 WThor games -> dataset variant (.ods), split
    dataset stats FILE            size, unique boards, target spread
    dataset bound FILE            consistency upper bound on accuracy
    train                         train one network from a YAML config + flags
    bag train --members N         bootstrap-aggregated networks
    eval accuracy|grid|validity   prediction analytics for a policy descriptor
    eval benchmark                per-decision timing
    tournament --a P --b P        paired-openings tournament
    stage-gain                    per-stage winning-rate gain of a hybrid
    perft DEPTH                   leaf counts from the initial position

Policy descriptors:
    net:<checkpoint>   bag:<ckpt1>,<ckpt2>   search:<wpc|wpc@file|disc|mobility>:<depth>
    hybrid:<p1>;<p2>;<p3>;<p4>

Usage:
    othellonet dataset build --wthor data/wthor --variant unique-s --out data/unique_s
    othellonet train --config desk.yaml --train data/unique_s.train.ods --test data/unique_s.test.ods --out conv4.onn
    othellonet tournament --a net:conv4.onn --b search:wpc:2 --openings 0 --workers 4
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from omegaconf import OmegaConf

from othellonet.config import DEFAULT_TRAIN_CONFIG, TRAIN_CONFIGS_DIR, RunConfig
from othellonet.core import OthelloError, cell_name, initial_board, perft
from othellonet.dataset import (
    DatasetError,
    DatasetVariant,
    EncodingScheme,
    SplitOrder,
    SplitSpec,
    build_variant,
    consistency_upper_bound,
    load,
    load_with_header,
    majority_baseline,
    save,
    stats,
)
from othellonet.harness import (
    HarnessError,
    benchmark_policy,
    measure_policy_accuracy,
    resolve_openings,
    run_tournament,
    stage_gain,
)
from othellonet.nn import ModelError, TrainConfig, preset, save_model, train, train_bagged
from othellonet.policy import (
    DEFAULT_MIN_MOVE,
    PolicyError,
    accuracy_grid,
    masked_topk_accuracy,
    parse_policy,
    unmasked_validity_rate,
)
from othellonet.utils.file import format_summary, load_config, save_summary, save_table
from othellonet.wthor import WthorError, load_corpus, parse_wtb, validate

logger = logging.getLogger("othellonet")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def setup_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper()), format=LOG_FORMAT, datefmt="%H:%M:%S")


def _emit(summary: dict, path: Optional[str]) -> None:
    sys.stdout.write(format_summary(summary))
    if path:
        save_summary(summary, path)


def _resolve_config_path(name: Optional[str]) -> Path:
    if not name:
        return DEFAULT_TRAIN_CONFIG
    path = Path(name)
    if not path.exists() and (TRAIN_CONFIGS_DIR / path).exists():
        path = TRAIN_CONFIGS_DIR / path
    return path


# ----------------------------------------------------------------------------
# wthor
# ----------------------------------------------------------------------------


def cmd_wthor_inspect(args, run: RunConfig) -> int:
    header, records = parse_wtb(Path(args.file).read_bytes())
    _emit(
        {
            "file": args.file,
            "created": f"{header.created_century:02d}{header.created_year:02d}-{header.created_month:02d}-{header.created_day:02d}",
            "records": header.record_count,
            "game_year": header.game_year,
            "board_size": header.board_size or 8,
            "depth": header.depth,
        },
        None,
    )
    for record in records[: args.games]:
        moves = " ".join(cell_name(c) for c in record.decoded_moves())
        print(f"#{record.game_id} t={record.tournament_id} b={record.black_player_id} w={record.white_player_id} "
              f"score={record.real_score} theo={record.theoretical_score}: {moves}")
    return 0


def cmd_wthor_validate(args, run: RunConfig) -> int:
    paths = args.paths[0] if len(args.paths) == 1 else args.paths
    _emit(validate(paths, n_jobs=args.jobs or run.workers), args.summary)
    return 0


# ----------------------------------------------------------------------------
# dataset
# ----------------------------------------------------------------------------


def cmd_dataset_build(args, run: RunConfig) -> int:
    variant = DatasetVariant(args.variant)
    scheme = EncodingScheme(args.encoding)
    seed = run.seed if args.seed is None else args.seed
    corpus = load_corpus(args.wthor or run.path("wthor"), n_jobs=args.jobs or run.workers, show_progress=not args.quiet)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.no_split:
        data = build_variant(corpus.games, variant, n_jobs=args.jobs or run.workers)
        save(data, out.with_suffix(".ods"), scheme)
        _emit({"variant": variant.value, "examples": len(data)}, args.summary)
        return 0

    if args.test_fraction is None:
        split_spec = SplitSpec.for_variant(variant, seed, SplitOrder(args.split_order))
    else:
        split_spec = SplitSpec(args.test_fraction, seed, SplitOrder(args.split_order))
    train_set, test_set = build_variant(corpus.games, variant, split_spec, n_jobs=args.jobs or run.workers)
    save(train_set, out.with_name(out.name + ".train.ods"), scheme)
    save(test_set, out.with_name(out.name + ".test.ods"), scheme)
    _emit(
        {
            "variant": variant.value,
            "encoding": scheme.value,
            "split_order": split_spec.split_order.value,
            "test_fraction": split_spec.test_fraction,
            "seed": seed,
            "train": len(train_set),
            "test": len(test_set),
            "majority_baseline": majority_baseline(train_set, test_set),
        },
        args.summary,
    )
    return 0


def cmd_dataset_stats(args, run: RunConfig) -> int:
    data, header = load_with_header(args.file)
    summary = {"file": args.file, "encoding": header.scheme.value, **stats(data)}
    summary["majority_baseline"] = majority_baseline(data)
    _emit(summary, args.summary)
    return 0


def cmd_dataset_bound(args, run: RunConfig) -> int:
    _emit({"file": args.file, "consistency_bound": consistency_upper_bound(load(args.file))}, args.summary)
    return 0


# ----------------------------------------------------------------------------
# train / bag
# ----------------------------------------------------------------------------


def _training_setup(args):
    """Merge CLI flags over the YAML config; returns (config, network spec, scheme, train config)."""
    config = load_config(_resolve_config_path(args.config))
    overrides = {
        "network": {
            "arch": args.arch,
            "encoding": args.encoding,
            "batch_norm": True if args.bn else None,
            "dropout": args.dropout,
            "width": args.width,
        },
        "train": {"seed": args.seed, "epochs": args.epochs, "batch_size": args.batch_size, "base_lr": args.lr},
    }
    for section, values in overrides.items():
        for key, value in values.items():
            if value is not None:
                OmegaConf.update(config, f"{section}.{key}", value)

    net = config.network
    scheme = EncodingScheme(net.encoding)
    spec = preset(
        net.arch,
        input_channels=scheme.channels,
        batch_norm=bool(net.batch_norm),
        dropout=float(net.dropout),
        width=net.width,
        fc_units=int(net.fc_units),
    )
    train_config = TrainConfig.from_mapping(OmegaConf.to_container(config.train, resolve=True))
    logger.info(f"Network {spec.describe()} ({spec.parameter_count()} parameters), {train_config}")
    return config, spec, scheme, train_config


def cmd_train(args, run: RunConfig) -> int:
    run.apply_torch_threads()
    _, spec, scheme, train_config = _training_setup(args)
    train_set = load(args.train)
    test_set = load(args.test) if args.test else None
    params, log = train(
        spec,
        train_set,
        train_config,
        test=test_set,
        scheme=scheme,
        log_path=args.log,
        show_progress=not args.quiet,
    )
    save_model(spec, params, args.out, scheme)
    last = log.records[-1]
    _emit(
        {
            "network": spec.name,
            "parameters": spec.parameter_count(),
            "epochs": last.epoch,
            "train_loss": last.train_loss,
            "test_top1": last.test_top1,
            "checkpoint": args.out,
        },
        args.summary,
    )
    return 0


def cmd_bag_train(args, run: RunConfig) -> int:
    run.apply_torch_threads()
    _, spec, scheme, train_config = _training_setup(args)
    train_set = load(args.train)
    test_set = load(args.test) if args.test else None
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    members = train_bagged(spec, train_set, train_config, args.members, scheme, test_set, show_progress=not args.quiet)
    paths = []
    for index, (params, log) in enumerate(members):
        path = out_dir / f"member_{index:02d}.onn"
        save_model(spec, params, path, scheme)
        log.write(out_dir / f"member_{index:02d}.tsv")
        paths.append(str(path))
    _emit({"members": len(paths), "policy": "bag:" + ",".join(paths)}, args.summary)
    return 0


# ----------------------------------------------------------------------------
# eval
# ----------------------------------------------------------------------------


def cmd_eval(args, run: RunConfig) -> int:
    run.apply_torch_threads()
    policy = parse_policy(args.policy)
    data = load(args.data)
    summary = {"policy": policy.name, "data": args.data, "examples": len(data)}

    if args.what == "accuracy":
        if args.k == 1:
            summary["accuracy"] = measure_policy_accuracy(policy, data)
        else:
            summary[f"top{args.k}_accuracy"] = masked_topk_accuracy(policy, data, args.k)
    elif args.what == "validity":
        summary["unmasked_validity"] = unmasked_validity_rate(policy, data)
    elif args.what == "grid":
        ks = tuple(int(k) for k in args.ks.split(","))
        grid = accuracy_grid(policy, data, ks, min_move=args.min_move)
        for k in ks:
            summary[f"top{k}_overall"] = grid.overall(k)
        if args.out:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(grid.to_tsv(), encoding="utf-8")
        else:
            sys.stdout.write(grid.to_tsv())
    elif args.what == "benchmark":
        summary.update(benchmark_policy(policy, data, batch_size=args.batch_size, repeats=args.repeats))
    _emit(summary, args.summary)
    return 0


# ----------------------------------------------------------------------------
# tournament / stage-gain
# ----------------------------------------------------------------------------


def cmd_tournament(args, run: RunConfig) -> int:
    a, b = parse_policy(args.a), parse_policy(args.b)
    openings = resolve_openings(args.openings, args.count, args.plies)
    report = run_tournament(
        a, b, openings, workers=args.workers or run.workers, show_progress=not args.quiet, torch_threads=run.torch_threads
    )
    if args.out:
        save_table(report.HEADER, report.rows(), args.out)
    summary = report.summary()
    if args.timing:
        summary.update(report.timing_summary())
    _emit(summary, args.summary)
    return 0


def cmd_stage_gain(args, run: RunConfig) -> int:
    base, strong = parse_policy(args.base), parse_policy(args.strong)
    opponents = [parse_policy(d) for d in args.opponents]
    openings = resolve_openings(args.openings, args.count, args.plies)
    report = stage_gain(base, strong, opponents, openings, workers=args.workers or run.workers)
    if args.out:
        save_table(report.HEADER, report.rows(), args.out)
    summary = {"base": base.name, "strong": strong.name, "openings": len(openings)}
    for (lo, hi), row in zip(report.stages, report.gains()):
        summary[f"gain_{lo}_{hi}"] = sum(row) / len(row)
    _emit(summary, args.summary)
    return 0


def cmd_perft(args, run: RunConfig) -> int:
    for depth in range(1, args.depth + 1):
        print(f"{depth}\t{perft(initial_board(), depth)}")
    return 0


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def _add_training_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config (path or name under configs/train)")
    p.add_argument("--train", required=True, help="Training dataset (.ods)")
    p.add_argument("--test", help="Held-out dataset for the per-epoch top-1 column")
    p.add_argument("--arch", choices=["conv4", "conv6", "conv8", "linear"])
    p.add_argument("--bn", action="store_true", help="BatchNorm after every convolution")
    p.add_argument("--dropout", type=float)
    p.add_argument("--encoding", choices=[s.value for s in EncodingScheme])
    p.add_argument("--width", type=int, help="Maps per conv layer (overrides the preset)")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="othellonet",
        description="Othello move predictors from expert games",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--quiet", action="store_true", help="Disable progress bars")
    parser.add_argument("--data-dir", help="Overrides OTHELLO_DATA_DIR")
    parser.add_argument("--summary", help="Also write the key=value summary to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    # wthor
    wthor = sub.add_parser("wthor", help="WThor files").add_subparsers(dest="action", required=True)
    p = wthor.add_parser("inspect")
    p.add_argument("file")
    p.add_argument("--games", type=int, default=5)
    p.set_defaults(handler=cmd_wthor_inspect)
    p = wthor.add_parser("validate")
    p.add_argument("paths", nargs="+", help="A directory of .wtb files or a list of files")
    p.add_argument("--jobs", type=int)
    p.set_defaults(handler=cmd_wthor_validate)

    # dataset
    dataset = sub.add_parser("dataset", help="Dataset variants").add_subparsers(dest="action", required=True)
    p = dataset.add_parser("build")
    p.add_argument("--wthor", help="Directory of .wtb files (default <data-dir>/wthor)")
    p.add_argument("--variant", default="unique-s", choices=[v.value for v in DatasetVariant])
    p.add_argument("--encoding", default="pieces", choices=[s.value for s in EncodingScheme])
    p.add_argument("--split-order", default="before", choices=[o.value for o in SplitOrder])
    p.add_argument("--test-fraction", type=float, help="Default: 0.25, or 0.05 for symmetric variants")
    p.add_argument("--seed", type=int)
    p.add_argument("--no-split", action="store_true", help="Write the whole variant to <out>.ods")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True, help="Output prefix; writes <out>.train.ods and <out>.test.ods")
    p.set_defaults(handler=cmd_dataset_build)
    for name, handler in (("stats", cmd_dataset_stats), ("bound", cmd_dataset_bound)):
        p = dataset.add_parser(name)
        p.add_argument("file")
        p.set_defaults(handler=handler)

    # train
    p = sub.add_parser("train", help="Train one network")
    _add_training_args(p)
    p.add_argument("--out", required=True, help="Checkpoint path (.onn)")
    p.add_argument("--log", help="Training log TSV")
    p.set_defaults(handler=cmd_train)

    # bag
    bag = sub.add_parser("bag", help="Bagged networks").add_subparsers(dest="action", required=True)
    p = bag.add_parser("train")
    _add_training_args(p)
    p.add_argument("--members", type=int, default=10)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_bag_train)

    # eval
    p = sub.add_parser("eval", help="Prediction analytics")
    p.add_argument("what", choices=["accuracy", "grid", "validity", "benchmark"])
    p.add_argument("--policy", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ks", default="1,2,3", help="grid: comma-separated k values")
    p.add_argument("--min-move", type=int, default=DEFAULT_MIN_MOVE)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out", help="grid: TSV output path")
    p.set_defaults(handler=cmd_eval)

    # tournament
    p = sub.add_parser("tournament", help="Paired-openings tournament")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--openings", default="0", help="Generator seed or openings file")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--plies", type=int, default=6)
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="Append per-move timing to the summary")
    p.add_argument("--out", help="Per-opening TSV")
    p.set_defaults(handler=cmd_tournament)

    # stage-gain
    p = sub.add_parser("stage-gain", help="Per-stage gain of a hybrid policy")
    p.add_argument("--base", required=True)
    p.add_argument("--strong", required=True)
    p.add_argument("--opponents", nargs="+", required=True)
    p.add_argument("--openings", default="0")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--plies", type=int, default=6)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="TSV of rates and gains")
    p.set_defaults(handler=cmd_stage_gain)

    # perft
    p = sub.add_parser("perft", help="Move-generator leaf counts")
    p.add_argument("depth", type=int)
    p.set_defaults(handler=cmd_perft)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        run = RunConfig(data_dir=args.data_dir)
        return args.handler(args, run)
    except (OthelloError, WthorError, DatasetError, ModelError, PolicyError, HarnessError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except (OSError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
