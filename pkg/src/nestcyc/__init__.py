"""Certifying construction of two nested cycles without crossings."""

from .graph import (
    Graph,
    GraphError,
    ball,
    build_graph,
    canonical_cycle,
    degree_stats,
    shortest_cycle,
    shortest_path_between_sets,
    sphere,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphError",
    "ball",
    "build_graph",
    "canonical_cycle",
    "degree_stats",
    "shortest_cycle",
    "shortest_path_between_sets",
    "sphere",
]
