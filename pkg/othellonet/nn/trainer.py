"""
Training loop, evaluation and bagging.

Training is single-threaded deterministic: the shuffle order and dropout
masks come from torch generators seeded by TrainConfig.seed.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import torch
from tqdm import tqdm

from othellonet.dataset import EmptyDataset, EncodingScheme, TripleSet, bootstrap_sample, encode_batch, target_indices
from othellonet.nn.network import NetworkSpec, Parameters, backward, forward, he_init, loss, predict
from othellonet.nn.optim import OptimizerState, TrainConfig, lr_at, sgd_step

logger = logging.getLogger(__name__)

EVAL_CHUNK = 4096


@dataclass
class Examples:
    planes: torch.Tensor  # (N, C, 8, 8)
    targets: torch.Tensor  # (N,) output indices 0..59

    def __len__(self) -> int:
        return self.targets.shape[0]


def to_examples(data: TripleSet, scheme: EncodingScheme, dtype: torch.dtype = torch.float32) -> Examples:
    planes = torch.from_numpy(encode_batch(data.mover, data.opponent, scheme)).to(dtype)
    targets = torch.from_numpy(target_indices(data.target))
    return Examples(planes, targets)


def _as_examples(data: Union[Examples, TripleSet], scheme: EncodingScheme) -> Examples:
    return data if isinstance(data, Examples) else to_examples(data, scheme)


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    train_loss: float
    test_top1: float


@dataclass
class TrainingLog:
    records: List[EpochRecord] = field(default_factory=list)
    config: Optional[TrainConfig] = None
    network: str = ""
    seconds: float = 0.0

    def to_tsv(self) -> str:
        lines = []
        if self.config is not None:
            settings = " ".join(f"{k}={v}" for k, v in self.config.to_dict().items())
            lines.append(f"# network={self.network} momentum=classical {settings}")
        lines.append("epoch\tlr\ttrain_loss\ttest_top1")
        lines += [f"{r.epoch}\t{r.lr:.6g}\t{r.train_loss:.6f}\t{r.test_top1:.4f}" for r in self.records]
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_tsv())


def topk_hits(outputs: torch.Tensor, targets: torch.Tensor, k: int) -> torch.Tensor:
    """
    Boolean per example: target among the k highest outputs. Ties rank the
    lower index first.
    """
    target_scores = outputs.gather(1, targets.reshape(-1, 1))
    index = torch.arange(outputs.shape[1]).reshape(1, -1)
    ahead = (outputs > target_scores) | ((outputs == target_scores) & (index < targets.reshape(-1, 1)))
    return ahead.sum(dim=1) < k


def evaluate_topk(
    spec: NetworkSpec,
    params: Parameters,
    data: Union[Examples, TripleSet],
    k: int = 1,
    scheme: EncodingScheme = EncodingScheme.PIECES,
) -> float:
    """Unmasked top-k accuracy (%) over all 60 outputs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    examples = _as_examples(data, scheme)
    if len(examples) == 0:
        raise EmptyDataset("Cannot evaluate on an empty dataset")
    hits = 0
    for start in range(0, len(examples), EVAL_CHUNK):
        outputs = predict(spec, params, examples.planes[start : start + EVAL_CHUNK])
        hits += int(topk_hits(outputs, examples.targets[start : start + EVAL_CHUNK], k).sum())
    return 100.0 * hits / len(examples)


def train(
    spec: NetworkSpec,
    data: Union[Examples, TripleSet],
    config: TrainConfig,
    test: Optional[Union[Examples, TripleSet]] = None,
    scheme: EncodingScheme = EncodingScheme.PIECES,
    params: Optional[Parameters] = None,
    log_path: Optional[Union[str, Path]] = None,
    show_progress: bool = False,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> Tuple[Parameters, TrainingLog]:
    """
    Mini-batch SGD with momentum, halving the learning rate on schedule.

    Args:
        spec: Network to train.
        data: Training triples or pre-encoded examples.
        config: Hyper-parameters; `seed` drives init, shuffling and dropout.
        test: Held-out set for the per-epoch top-1 column (NaN when absent).
        scheme: Encoding used when `data`/`test` are TripleSets.
        params: Start from these parameters instead of He initialisation.
        log_path: Write the TSV training log here when given.

    Returns:
        (trained parameters, training log)
    """
    examples = _as_examples(data, scheme)
    if len(examples) == 0:
        raise EmptyDataset("Cannot train on an empty dataset")
    held_out = _as_examples(test, scheme) if test is not None else None

    params = he_init(spec, config.seed) if params is None else params
    state = OptimizerState(params)
    shuffle_gen = torch.Generator().manual_seed(config.seed)
    dropout_gen = torch.Generator().manual_seed(config.seed + 1)

    n = len(examples)
    steps_per_epoch = math.ceil(n / config.batch_size)
    log = TrainingLog(config=config, network=spec.describe())
    started = time.perf_counter()
    logger.info(
        f"Training {spec.name} ({spec.parameter_count()} parameters) on {n} examples, "
        f"{config.epochs} epochs x {steps_per_epoch} batches"
    )

    for epoch in range(config.epochs):
        order = torch.randperm(n, generator=shuffle_gen)
        total_loss = 0.0
        lr = config.base_lr
        batches = tqdm(range(steps_per_epoch), desc=f"epoch {epoch + 1}", disable=not show_progress, leave=False)
        for b in batches:
            index = order[b * config.batch_size : (b + 1) * config.batch_size]
            planes, targets = examples.planes[index], examples.targets[index]
            lr = lr_at(state.step, steps_per_epoch, config)

            trace = forward(spec, params, planes, train=True, generator=dropout_gen)
            batch_loss = loss(trace.outputs, targets, params, config.l2)
            grads = backward(spec, params, trace, targets, config.l2)
            sgd_step(params, grads, state, lr, config.momentum)
            total_loss += batch_loss * len(index)

        top1 = evaluate_topk(spec, params, held_out, 1) if held_out is not None else float("nan")
        record = EpochRecord(epoch + 1, lr, total_loss / n, top1)
        log.records.append(record)
        logger.info(f"epoch {record.epoch}: lr={lr:.5g} loss={record.train_loss:.4f} test_top1={top1:.2f}")
        if on_epoch is not None:
            on_epoch(record)

    log.seconds = time.perf_counter() - started
    if log_path is not None:
        log.write(log_path)
    return params, log


def train_bagged(
    spec: NetworkSpec,
    data: TripleSet,
    config: TrainConfig,
    members: int = 10,
    scheme: EncodingScheme = EncodingScheme.PIECES,
    test: Optional[TripleSet] = None,
    show_progress: bool = False,
) -> List[Tuple[Parameters, TrainingLog]]:
    """Train `members` networks, member i on a bootstrap resample seeded config.seed + i."""
    if members < 1:
        raise ValueError("A bag needs at least one member")
    results = []
    for member in range(members):
        seed = config.seed + member
        sample = bootstrap_sample(data, seed)
        member_config = TrainConfig(**{**config.to_dict(), "seed": seed})
        logger.info(f"Bag member {member + 1}/{members}: {len(sample)} bootstrap examples, seed {seed}")
        results.append(train(spec, sample, member_config, test=test, scheme=scheme, show_progress=show_progress))
    return results
