"""Exact height-bounded layering of directed graphs.

Layer assignment that minimises a weighted sum of reversed arcs, total arc
length and drawing width (dummy vertices included) for a given maximum height.
"""

from .graph import DiGraph, RandomGraphSpec, generate_random, parse_edge_list, write_edge_list
from .layering import Layering, LayeringMetrics, metrics, validate
from .objective import Objective, Weights, evaluate

__version__ = "0.1.0"

__all__ = [
    "DiGraph",
    "Layering",
    "LayeringMetrics",
    "Objective",
    "RandomGraphSpec",
    "Weights",
    "evaluate",
    "generate_random",
    "metrics",
    "parse_edge_list",
    "validate",
    "write_edge_list",
]
