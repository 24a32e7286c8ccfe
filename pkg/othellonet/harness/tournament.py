"""
Paired-openings tournaments.

From every opening each policy plays once as Black; the winning rate is the
percentage of the 2 x |openings| available points scored by the first policy.
"""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from tqdm import tqdm

from othellonet.core import Player
from othellonet.harness.buffer import OrderedResultBuffer
from othellonet.harness.games import MatchResult, play_pair
from othellonet.harness.openings import OpeningSet
from othellonet.harness.workers import TournamentServer
from othellonet.policy import Policy

logger = logging.getLogger(__name__)


@dataclass
class TournamentReport:
    policy_a: str
    policy_b: str
    matches: List[MatchResult] = field(default_factory=list)

    @property
    def points(self) -> float:
        return sum(m.total for m in self.matches)

    @property
    def winning_rate(self) -> float:
        if not self.matches:
            return 0.0
        return 100.0 * self.points / (2 * len(self.matches))

    def move_times(self) -> Dict[str, List[float]]:
        """Per-decision seconds for each side, across all games."""
        times = {"a": [], "b": []}
        for m in self.matches:
            times["a"] += m.game_as_black.times.get(Player.BLACK, []) + m.game_as_white.times.get(Player.WHITE, [])
            times["b"] += m.game_as_black.times.get(Player.WHITE, []) + m.game_as_white.times.get(Player.BLACK, [])
        return times

    def timing_summary(self) -> Dict[str, float]:
        out = {}
        for side, values in self.move_times().items():
            out[f"{side}_mean_move_seconds"] = statistics.fmean(values) if values else 0.0
            out[f"{side}_decisions"] = len(values)
        return out

    def summary(self) -> Dict[str, object]:
        """Deterministic summary; timing lives in timing_summary()."""
        wins = sum(1 for m in self.matches for p in (m.points_as_black, m.points_as_white) if p == 1.0)
        draws = sum(1 for m in self.matches for p in (m.points_as_black, m.points_as_white) if p == 0.5)
        return {
            "policy_a": self.policy_a,
            "policy_b": self.policy_b,
            "openings": len(self.matches),
            "games": 2 * len(self.matches),
            "wins": wins,
            "draws": draws,
            "losses": 2 * len(self.matches) - wins - draws,
            "points": self.points,
            "winning_rate": round(self.winning_rate, 6),
        }

    def rows(self) -> List[List[object]]:
        return [
            [
                m.opening_id,
                m.points_as_black,
                m.points_as_white,
                m.game_as_black.outcome.black,
                m.game_as_black.outcome.white,
                m.game_as_white.outcome.black,
                m.game_as_white.outcome.white,
                m.game_as_black.to_text(),
                m.game_as_white.to_text(),
            ]
            for m in self.matches
        ]

    HEADER = [
        "opening",
        "a_black_points",
        "a_white_points",
        "g1_black_discs",
        "g1_white_discs",
        "g2_black_discs",
        "g2_white_discs",
        "g1_moves",
        "g2_moves",
    ]


def run_tournament(
    a: Policy,
    b: Policy,
    openings: OpeningSet,
    workers: int = 1,
    show_progress: bool = False,
    torch_threads: int = 1,
) -> TournamentReport:
    """
    Play every opening twice with colours switched.

    With workers > 1 pairs run in a process pool; results are merged in
    opening-id order so the report does not depend on the worker count.
    """
    report = TournamentReport(a.name, b.name)
    logger.info(f"Tournament {a.name} vs {b.name}: {len(openings)} openings, {workers} worker(s)")

    if workers <= 1:
        for opening_id, opening in enumerate(tqdm(openings, desc="openings", disable=not show_progress)):
            report.matches.append(play_pair(a, b, opening.board, opening_id))
    else:
        buffer = OrderedResultBuffer()
        with TournamentServer(a, b, num_workers=workers, torch_threads=torch_threads) as server:
            for opening_id, opening in enumerate(openings):
                server.submit_job(opening_id, opening.board)
            progress = tqdm(total=len(openings), desc="openings", disable=not show_progress)
            for result in server.get_all_results(len(openings)):
                buffer.add_with_position(result.match, result.opening_id)
                report.matches.extend(buffer.drain())
                progress.update(1)
            progress.close()
        if not buffer.complete:
            raise RuntimeError("Tournament finished with results missing")

    logger.info(f"{a.name} vs {b.name}: winning rate {report.winning_rate:.2f}%")
    return report


@dataclass
class RoundRobinReport:
    policy: str
    reports: List[TournamentReport]

    @property
    def rates(self) -> Dict[str, float]:
        return {r.policy_b: r.winning_rate for r in self.reports}

    @property
    def average_rate(self) -> float:
        return statistics.fmean(r.winning_rate for r in self.reports) if self.reports else 0.0


def round_robin(
    policy: Policy,
    opponents: Sequence[Policy],
    openings: OpeningSet,
    workers: int = 1,
    show_progress: bool = False,
) -> RoundRobinReport:
    """Winning rate of `policy` against each opponent and their average."""
    reports = [run_tournament(policy, opp, openings, workers, show_progress) for opp in opponents]
    result = RoundRobinReport(policy.name, reports)
    logger.info(f"{policy.name}: average winning rate {result.average_rate:.2f}% over {len(opponents)} opponents")
    return result
