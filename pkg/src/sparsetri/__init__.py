"""Triangles and vertices in triangles in sparse Erdos-Renyi graphs."""

from .conditional import expected_triangles_conditional, triple_profile
from .cores import CoreParams, extract_core, is_seed
from .graph import ErParams, Graph, sample_er, subgraph_counts, toggle_edge, triangle_stats
from .qbasic import decompose_qbasic, extract_qbasic, minimize_entropy, validate_decomposition
from .tails import exact_tail, is_clique_tail, mc_tail
from .variational import phi_exact

__version__ = "0.1.0"

__all__ = [
    "CoreParams",
    "ErParams",
    "Graph",
    "decompose_qbasic",
    "exact_tail",
    "expected_triangles_conditional",
    "extract_core",
    "extract_qbasic",
    "is_clique_tail",
    "is_seed",
    "mc_tail",
    "minimize_entropy",
    "phi_exact",
    "sample_er",
    "subgraph_counts",
    "toggle_edge",
    "triangle_stats",
    "triple_profile",
    "validate_decomposition",
]
