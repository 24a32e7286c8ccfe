"""Network-backed policies: a single predictor and a bagged ensemble."""

from __future__ import annotations

from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import torch

from othellonet.core import Board, canonicalize
from othellonet.dataset import EncodingScheme, TripleSet, encode, encode_batch
from othellonet.nn import NetworkSpec, Parameters, ShapeMismatch, load_model, predict
from othellonet.policy.base import ConfidencePolicy

BATCH = 4096


class PredictorPolicy(ConfidencePolicy):
    """0-ply move predictor: canonicalize, encode, run the network in infer mode."""

    def __init__(self, spec: NetworkSpec, params: Parameters, scheme: EncodingScheme, name: str = ""):
        if scheme.channels != spec.input_channels:
            raise ShapeMismatch(
                f"Encoding {scheme.value} has {scheme.channels} planes, network expects {spec.input_channels}"
            )
        self.spec = spec
        self.params = params
        self.scheme = scheme
        self.name = name or f"net:{spec.name}"

    @classmethod
    def from_checkpoint(cls, path: Union[str, Path]) -> "PredictorPolicy":
        checkpoint = load_model(path)
        return cls(checkpoint.spec, checkpoint.params, checkpoint.scheme, name=f"net:{path}")

    def predict_distribution(self, board: Board) -> np.ndarray:
        planes = torch.from_numpy(encode(canonicalize(board), self.scheme)).unsqueeze(0)
        return predict(self.spec, self.params, planes)[0].double().numpy()

    def confidences(self, board: Board) -> np.ndarray:
        return self.predict_distribution(board)

    def confidences_batch(self, data: TripleSet) -> np.ndarray:
        out = []
        for start in range(0, len(data), BATCH):
            part = data[np.arange(start, min(start + BATCH, len(data)))]
            planes = torch.from_numpy(encode_batch(part.mover, part.opponent, self.scheme))
            out.append(predict(self.spec, self.params, planes).double().numpy())
        return np.concatenate(out) if out else np.zeros((0, 60))


def predict_distribution(policy: PredictorPolicy, board: Board) -> np.ndarray:
    return policy.predict_distribution(board)


class BaggedPolicy(ConfidencePolicy):
    """Mean of member softmax outputs."""

    def __init__(self, members: Sequence[PredictorPolicy], name: str = ""):
        if not members:
            raise ValueError("A bag needs at least one member")
        first = members[0]
        for member in members[1:]:
            if member.scheme is not first.scheme or member.spec.layers != first.spec.layers:
                raise ShapeMismatch("Bag members must share network spec and encoding")
        self.members: List[PredictorPolicy] = list(members)
        self.name = name or f"bag:{len(members)}x{first.spec.name}"

    @classmethod
    def from_checkpoints(cls, paths: Sequence[Union[str, Path]]) -> "BaggedPolicy":
        return cls([PredictorPolicy.from_checkpoint(p) for p in paths], name="bag:" + ",".join(map(str, paths)))

    def confidences(self, board: Board) -> np.ndarray:
        return np.mean([m.predict_distribution(board) for m in self.members], axis=0)

    def confidences_batch(self, data: TripleSet) -> np.ndarray:
        return np.mean([m.confidences_batch(data) for m in self.members], axis=0)


def bagged_confidences(policy: BaggedPolicy, board: Board) -> np.ndarray:
    return policy.confidences(board)
