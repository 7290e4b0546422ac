"""Simulation and exact analysis of money-exchange chains on connected graphs."""

from .dynamics import ModelKind, make_state, replica_rng, run, run_occupation
from .exact import (
    model1_marginal,
    model1_marginal_limit,
    model1_marginal_vector,
    model2_marginal,
    model2_marginal_vector,
)
from .graphs import Graph, build_graph, generate, parse_graph_spec
from .oracle import oracle_report
from .states import (
    IndexOutOfRangeError,
    SpaceTooLargeError,
    count_states,
    enumerate_configs,
    rank_config,
    unrank_config,
)
from .stats import Histogram, chi_square, occupation_time, tv_distance

__all__ = [
    "Graph",
    "Histogram",
    "IndexOutOfRangeError",
    "ModelKind",
    "SpaceTooLargeError",
    "build_graph",
    "chi_square",
    "count_states",
    "enumerate_configs",
    "generate",
    "make_state",
    "model1_marginal",
    "model1_marginal_limit",
    "model1_marginal_vector",
    "model2_marginal",
    "model2_marginal_vector",
    "occupation_time",
    "oracle_report",
    "parse_graph_spec",
    "rank_config",
    "replica_rng",
    "run",
    "run_occupation",
    "tv_distance",
    "unrank_config",
]

__version__ = "0.1.0"
