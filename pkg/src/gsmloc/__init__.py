"""Deterministic simulator of GSM location management, baseline vs. two-tier fuzzy VLR."""

from .fuzzy import (
    LinguisticLabel,
    VisitStats,
    classify_visits,
    default_fuzzy_specs,
    eval_membership,
    min_intersection,
    select_frequent,
)
from .network import Network, Topology, build_topology, read_topology
from .protocol import MessageKind, MessageLog, deliver_call, register_arrival
from .sim import SimConfig, compare_schemes, run_simulation
from .tiered import TierConfig, TieredVlr, get_common_ms, intelligent_deliver, intelligent_register
from .traces import CommuterParams, TraceEvent, generate_commuter_trace, read_trace

__version__ = "0.1.0"

__all__ = [
    "CommuterParams", "LinguisticLabel", "MessageKind", "MessageLog", "Network", "SimConfig",
    "TierConfig", "TieredVlr", "Topology", "TraceEvent", "VisitStats", "build_topology",
    "classify_visits", "compare_schemes", "default_fuzzy_specs", "deliver_call", "eval_membership",
    "generate_commuter_trace", "get_common_ms", "intelligent_deliver", "intelligent_register",
    "min_intersection", "read_topology", "read_trace", "register_arrival", "run_simulation",
    "select_frequent",
]
