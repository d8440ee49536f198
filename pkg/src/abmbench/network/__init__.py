"""Attributed graphs, centrality measures, QUDG topologies and model footprints."""
from .dream import (BASELINE_EDGES, Footprint, ManifestError, ModelManifest, dream_baseline,
                    dream_expand, dream_footprint)
from .edgelist import EdgeListError, read_edge_list, write_edge_list
from .graph import Graph, GraphError
from .measures import (betweenness_centrality, closeness_centrality, clustering_coefficient,
                       degree_centrality, eccentricity_centrality, matching_index, mean_clustering)
from .qudg import generate_qudg, unit_disk_graph

__all__ = [
    "BASELINE_EDGES", "EdgeListError", "Footprint", "Graph", "GraphError", "ManifestError",
    "ModelManifest", "betweenness_centrality", "closeness_centrality", "clustering_coefficient",
    "degree_centrality", "dream_baseline", "dream_expand", "dream_footprint",
    "eccentricity_centrality", "generate_qudg", "matching_index", "mean_clustering",
    "read_edge_list", "unit_disk_graph", "write_edge_list",
]
