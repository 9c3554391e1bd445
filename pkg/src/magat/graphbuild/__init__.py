"""Geospatial neighbourhood graphs with multi-relation affinities."""

from .affinity import (AffinityStack, NeighbourhoodGraph, RELATION_NAMES,
                       SinkhornError, affinity_stack, build_graph,
                       edge_distances, gaussian_similarity,
                       sinkhorn_normalize, standardize_distances,
                       write_graph_dump)
from .geo import (EARTH_RADIUS_KM, haversine, haversine_matrix,
                  haversine_matrix_block, knn_indices, knn_neighbourhood)

__all__ = [
    "haversine", "haversine_matrix", "haversine_matrix_block",
    "knn_indices", "knn_neighbourhood", "EARTH_RADIUS_KM",
    "edge_distances", "standardize_distances", "gaussian_similarity",
    "sinkhorn_normalize", "SinkhornError",
    "AffinityStack", "NeighbourhoodGraph", "affinity_stack", "build_graph",
    "write_graph_dump", "RELATION_NAMES",
]
