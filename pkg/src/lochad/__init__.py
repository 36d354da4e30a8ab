"""Deterministic distributed list colouring of K_t-minor-free graphs."""
from .algorithm import AlgoParams, LevelRecord, distributed_list_colour, sequential_reference_colour
from .graph import Colouring, Graph, ListAssignment, VertexSet, ball, verify_colouring

__all__ = [
    "AlgoParams",
    "Colouring",
    "Graph",
    "LevelRecord",
    "ListAssignment",
    "VertexSet",
    "ball",
    "distributed_list_colour",
    "sequential_reference_colour",
    "verify_colouring",
]
__version__ = "0.1.0"
