"""
Policy descriptor strings used on the command line:

    net:<checkpoint>
    bag:<checkpoint>,<checkpoint>,...
    search:<eval>:<depth>          eval = wpc | wpc@<file> | disc | mobility
    hybrid:<p1>;<p2>;<p3>;<p4>     one descriptor per default stage
"""

from othellonet.policy.base import DescriptorError, Policy
from othellonet.policy.hybrid import HybridPolicy
from othellonet.policy.predictor import BaggedPolicy, PredictorPolicy


def parse_policy(descriptor: str) -> Policy:
    kind, sep, rest = descriptor.strip().partition(":")
    if not sep or not rest:
        raise DescriptorError(f"Malformed policy descriptor {descriptor!r}")

    if kind == "net":
        return PredictorPolicy.from_checkpoint(rest)
    if kind == "bag":
        paths = [p for p in rest.split(",") if p]
        if not paths:
            raise DescriptorError("bag: needs at least one checkpoint")
        return BaggedPolicy.from_checkpoints(paths)
    if kind == "search":
        # imported here: search builds on policy.base
        from othellonet.search import SearchConfig, SearchPolicy, make_evaluator

        eval_name, sep, depth = rest.rpartition(":")
        if not sep or not depth.isdigit():
            raise DescriptorError(f"search descriptor needs <eval>:<depth>, got {rest!r}")
        try:
            return SearchPolicy(SearchConfig(int(depth), make_evaluator(eval_name)))
        except (ValueError, OSError) as e:
            raise DescriptorError(f"Bad search descriptor {descriptor!r}: {e}") from e
    if kind == "hybrid":
        parts = rest.split(";")
        if len(parts) != 4:
            raise DescriptorError(f"hybrid: needs 4 stage policies, got {len(parts)}")
        return HybridPolicy([parse_policy(p) for p in parts])
    raise DescriptorError(f"Unknown policy kind {kind!r}")
