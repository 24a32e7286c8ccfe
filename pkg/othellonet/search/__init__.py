"""Depth-n alpha-beta opponents with pluggable board evaluators."""

from othellonet.search.evaluation import (
    DEFAULT_WPC_PATH,
    WPC,
    DiscDiff,
    Evaluator,
    MobilityMix,
    is_symmetric,
    load_wpc,
    make_evaluator,
    symmetrize,
)
from othellonet.search.negamax import (
    TERMINAL_SCALE,
    MoveOrdering,
    SearchConfig,
    SearchPolicy,
    SearchResult,
    negamax,
    terminal_value,
)
