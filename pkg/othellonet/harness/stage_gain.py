"""Winning-rate gain from swapping in a stronger policy for one game stage."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from othellonet.harness.openings import OpeningSet
from othellonet.harness.tournament import run_tournament
from othellonet.policy import DEFAULT_STAGES, Policy, with_stage

logger = logging.getLogger(__name__)


@dataclass
class StageGainReport:
    stages: Tuple[Tuple[int, int], ...]
    opponents: List[str]
    base_rates: Dict[str, float]
    # hybrid_rates[stage index][opponent name]
    hybrid_rates: List[Dict[str, float]]

    def gain(self, stage: int, opponent: str) -> float:
        return self.hybrid_rates[stage][opponent] - self.base_rates[opponent]

    def gains(self) -> List[List[float]]:
        return [[self.gain(s, o) for o in self.opponents] for s in range(len(self.stages))]

    def rows(self) -> List[List[object]]:
        return [
            [f"{lo}-{hi}", opponent, self.base_rates[opponent], self.hybrid_rates[s][opponent], self.gain(s, opponent)]
            for s, (lo, hi) in enumerate(self.stages)
            for opponent in self.opponents
        ]

    HEADER = ["stage", "opponent", "base_rate", "hybrid_rate", "gain"]


def stage_gain(
    base: Policy,
    strong: Policy,
    opponents: Sequence[Policy],
    openings: OpeningSet,
    stages: Sequence[Tuple[int, int]] = DEFAULT_STAGES,
    workers: int = 1,
) -> StageGainReport:
    names = [o.name for o in opponents]
    if len(set(names)) != len(names):
        raise ValueError(f"Opponent names must be distinct: {names}")

    base_rates = {o.name: run_tournament(base, o, openings, workers).winning_rate for o in opponents}
    hybrid_rates = []
    for index in range(len(stages)):
        hybrid = with_stage(base, strong, index, stages)
        hybrid_rates.append({o.name: run_tournament(hybrid, o, openings, workers).winning_rate for o in opponents})
        logger.info(f"Stage {stages[index]}: " + ", ".join(f"{n}={hybrid_rates[-1][n] - base_rates[n]:+.2f}" for n in names))
    return StageGainReport(tuple(stages), names, base_rates, hybrid_rates)
