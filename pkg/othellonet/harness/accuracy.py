"""Policy accuracy against expert moves, the accuracy/strength fit and timing."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
import torch

from othellonet.dataset import EmptyDataset, TripleSet, encode_batch
from othellonet.policy import Policy, PredictorPolicy, policy_hits
from othellonet.nn import predict

logger = logging.getLogger(__name__)


def measure_policy_accuracy(policy: Policy, data: TripleSet) -> float:
    """Percentage of triples where the policy plays the recorded move."""
    if len(data) == 0:
        raise EmptyDataset("Cannot measure accuracy on an empty dataset")
    accuracy = 100.0 * float(policy_hits(policy, data).mean())
    logger.info(f"{policy.name}: accuracy {accuracy:.2f}% on {len(data)} triples")
    return accuracy


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float

    def predict(self, x: float) -> float:
        return self.slope * x + self.intercept


def fit_accuracy_strength(points: Sequence[Tuple[float, float]]) -> LinearFit:
    """Least-squares line through (accuracy, winning rate) pairs."""
    if len(points) < 2:
        raise ValueError("A linear fit needs at least two points")
    x = np.asarray([p[0] for p in points], dtype=np.float64)
    y = np.asarray([p[1] for p in points], dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((residual**2).sum()) / total if total > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2)


def benchmark_policy(policy: Policy, data: TripleSet, batch_size: int = 256, repeats: int = 1) -> Dict[str, float]:
    """
    Seconds per decision: single-board queries, and for predictors also the
    per-board cost amortised over one batch of `batch_size` boards.
    """
    if len(data) == 0:
        raise EmptyDataset("Cannot benchmark on an empty dataset")
    boards = data.boards()
    started = time.perf_counter()
    for _ in range(repeats):
        for board in boards:
            policy.choose(board)
    single = (time.perf_counter() - started) / (repeats * len(boards))
    result = {"single_query_seconds": single, "boards": float(len(boards))}

    if isinstance(policy, PredictorPolicy):
        index = np.arange(min(batch_size, len(data)))
        part = data[index]
        planes = torch.from_numpy(encode_batch(part.mover, part.opponent, policy.scheme))
        started = time.perf_counter()
        for _ in range(repeats):
            predict(policy.spec, policy.params, planes)
        result["batch_amortised_seconds"] = (time.perf_counter() - started) / (repeats * len(index))
        result["batch_size"] = float(len(index))
    return result
