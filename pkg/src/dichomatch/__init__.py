"""Two-sided matching with dichotomous agent preferences and strict institution priorities."""

from .axioms import AXIOMS, AuditReport, audit, recheck
from .bigraph import BiGraph, build_graph, lexi_optimal_set, max_matching, rank_maximal_matching, ranked_graph
from .blocks import SafeBlock, classify, find_safe_blocks, is_safe_block
from .estimators import (
    DeferredAcceptanceMatcher,
    FairnessRepair,
    RankMaximalMatcher,
    SafeMatcher,
    SequentialMatcher,
)
from .instance import (
    Instance,
    InstanceError,
    Matching,
    MatchingError,
    from_acceptance_lists,
    parse_instance,
    serialize_instance,
)
from .mechanisms import (
    da_mechanism,
    da_with_orders,
    default_tiebreak,
    fairify,
    pi_sequential,
    rankmax_mechanism,
    safe_mechanism,
)

__version__ = "0.1.0"

__all__ = [
    "AXIOMS",
    "AuditReport",
    "BiGraph",
    "DeferredAcceptanceMatcher",
    "FairnessRepair",
    "Instance",
    "InstanceError",
    "Matching",
    "MatchingError",
    "RankMaximalMatcher",
    "SafeBlock",
    "SafeMatcher",
    "SequentialMatcher",
    "audit",
    "build_graph",
    "classify",
    "da_mechanism",
    "da_with_orders",
    "default_tiebreak",
    "fairify",
    "find_safe_blocks",
    "from_acceptance_lists",
    "is_safe_block",
    "lexi_optimal_set",
    "max_matching",
    "parse_instance",
    "pi_sequential",
    "rank_maximal_matching",
    "ranked_graph",
    "recheck",
    "safe_mechanism",
    "serialize_instance",
]
