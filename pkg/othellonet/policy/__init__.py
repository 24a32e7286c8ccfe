"""Policies built from networks and searchers, plus prediction analytics."""

from othellonet.policy.analytics import (
    DEFAULT_MIN_MOVE,
    AccuracyGrid,
    accuracy_grid,
    masked_ranks,
    masked_topk_accuracy,
    policy_hits,
    unmasked_validity_rate,
)
from othellonet.policy.base import (
    ConfidencePolicy,
    DescriptorError,
    FixedPolicy,
    NoStage,
    Policy,
    PolicyError,
    choose_move,
    masked_argmax,
)
from othellonet.policy.descriptor import parse_policy
from othellonet.policy.hybrid import DEFAULT_STAGES, HybridPolicy, hybrid_choose, with_stage
from othellonet.policy.predictor import BaggedPolicy, PredictorPolicy, bagged_confidences, predict_distribution
