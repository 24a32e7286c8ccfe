"""Stage hybrids: a different policy per interval of move numbers."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

from othellonet.core import Board, Move
from othellonet.policy.base import NoStage, Policy

Stage = Tuple[int, int]

DEFAULT_STAGES: Tuple[Stage, ...] = ((1, 15), (16, 30), (31, 45), (46, 60))


class HybridPolicy(Policy):
    def __init__(self, policies: Sequence[Policy], stages: Sequence[Stage] = DEFAULT_STAGES, name: str = ""):
        if len(policies) != len(stages):
            raise ValueError(f"{len(policies)} policies for {len(stages)} stages")
        ordered = sorted(stages)
        for (lo, hi), (next_lo, _) in zip(ordered, ordered[1:]):
            if next_lo <= hi:
                raise ValueError(f"Stages {(lo, hi)} and {(next_lo, _)} overlap")
        for lo, hi in stages:
            if lo > hi:
                raise ValueError(f"Empty stage {(lo, hi)}")
        self.stages = tuple(stages)
        self.policies = tuple(policies)
        self.name = name or "hybrid:" + ";".join(p.name for p in policies)

    def policy_for(self, move_number: int) -> Policy:
        for (lo, hi), policy in zip(self.stages, self.policies):
            if lo <= move_number <= hi:
                return policy
        raise NoStage(f"No stage covers move number {move_number}")

    def choose(self, board: Board, move_number: Optional[int] = None) -> Move:
        return self.policy_for(board.move_number if move_number is None else move_number).choose(board)


def hybrid_choose(policy: HybridPolicy, board: Board, move_number: int) -> Move:
    return policy.choose(board, move_number)


def with_stage(base: Policy, strong: Policy, stage: int, stages: Sequence[Stage] = DEFAULT_STAGES) -> HybridPolicy:
    """`base` everywhere except stage `stage` (0-based), which plays `strong`."""
    policies = [strong if i == stage else base for i in range(len(stages))]
    return HybridPolicy(policies, stages, name=f"{base.name}+{strong.name}@stage{stage + 1}")
