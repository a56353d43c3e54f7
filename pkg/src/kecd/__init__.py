"""Community detection from the joint eigenvector/Katz centrality (KE) plot."""

from .centrality import (
    CentralityVector,
    KatzParams,
    KEPlot,
    eigenvector_centrality,
    katz_centrality,
    katz_closed_form,
    ke_points,
    normalize,
    spectral_radius,
)
from .cluster import ClusterParams, Detection, SweepProfile, detect_communities, orth_sq_distance
from .errors import ConvergenceError, DivergenceError, DomainError, GeometryError, ParseError
from .graph import Graph, parse_edge_list, read_edge_list
from .louvain import bench, ke_coarsen, louvain
from .netgen import AdHocSpec, LabeledGraph, adhoc_modular, gen_ba, gen_er
from .partition import Partition
from .quality import cluster_geometry, modularity, modularity_max, score, sweep_experiment

__version__ = "0.1.0"

__all__ = [
    "CentralityVector",
    "KatzParams",
    "KEPlot",
    "eigenvector_centrality",
    "katz_centrality",
    "katz_closed_form",
    "ke_points",
    "normalize",
    "spectral_radius",
    "ClusterParams",
    "Detection",
    "SweepProfile",
    "detect_communities",
    "orth_sq_distance",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "GeometryError",
    "ParseError",
    "Graph",
    "parse_edge_list",
    "read_edge_list",
    "bench",
    "ke_coarsen",
    "louvain",
    "AdHocSpec",
    "LabeledGraph",
    "adhoc_modular",
    "gen_ba",
    "gen_er",
    "Partition",
    "cluster_geometry",
    "modularity",
    "modularity_max",
    "score",
    "sweep_experiment",
]
