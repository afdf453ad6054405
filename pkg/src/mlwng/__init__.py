"""Naming game on multi-local-world (community-structured) networks."""

__version__ = "0.1.0"

from .generators import BaselineParams, MLWParams, gen_baseline, gen_mlw
from .graph import Graph, community_ratio, compute_stats, is_connected
from .naming_game import init_state, is_global_consensus, run, step

__all__ = [
    "BaselineParams",
    "Graph",
    "MLWParams",
    "community_ratio",
    "compute_stats",
    "gen_baseline",
    "gen_mlw",
    "init_state",
    "is_connected",
    "is_global_consensus",
    "run",
    "step",
]
