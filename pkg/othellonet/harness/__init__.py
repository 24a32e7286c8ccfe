"""Tournaments, stage-gain experiments and policy accuracy measurement."""

from othellonet.harness.accuracy import LinearFit, benchmark_policy, fit_accuracy_strength, measure_policy_accuracy
from othellonet.harness.buffer import OrderedResultBuffer
from othellonet.harness.errors import HarnessError, InsufficientPositions, InvalidOpening, PolicyFault
from othellonet.harness.games import MatchResult, Transcript, play_game, play_pair
from othellonet.harness.openings import (
    Opening,
    OpeningSet,
    count_distinct_positions,
    generate_openings,
    load_openings,
    replay_opening,
    resolve_openings,
    save_openings,
)
from othellonet.harness.stage_gain import StageGainReport, stage_gain
from othellonet.harness.tournament import RoundRobinReport, TournamentReport, round_robin, run_tournament
from othellonet.harness.workers import TournamentServer
