from edgemind.clustering.association import cluster_data_driven, cluster_geographic, size_bounds
from edgemind.clustering.graph import (
    build_transition_graph,
    normalized_laplacian,
    spectral_embed,
    transition_matrix,
    weight_graph,
)
from edgemind.clustering.kmeans import assign_with_bounds, constrained_kmeans, fit_constrained_kmeans

__all__ = [
    "assign_with_bounds",
    "build_transition_graph",
    "cluster_data_driven",
    "cluster_geographic",
    "constrained_kmeans",
    "fit_constrained_kmeans",
    "normalized_laplacian",
    "size_bounds",
    "spectral_embed",
    "transition_matrix",
    "weight_graph",
]
