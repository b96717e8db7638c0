"""Distributed density-based clustering with boundary-based local models.

Each node clusters its partition with DBSCAN and ships only the boundary
points of its clusters (with their balance vectors) plus cluster sizes. The
coordinator merges the boundaries and regenerates representative clusters.
"""
from .boundary import (
    DEFAULT_NU,
    BoundaryParams,
    BoundaryPoint,
    BoundarySet,
    Predicate,
    auto_rho,
    balance_field,
    detect_boundary,
    displacement_vector,
    is_boundary_cone,
    is_boundary_sphere,
)
from .dbscan import NOISE, ClusterParams, Clustering, cluster_points, dbscan
from .geometry import HyperRect, dist, dot, make_rng, meh, normalize, sample_uniform
from .global_merge import GlobalModel, GlobalParams, derive_global_params, merge
from .harness import Mode, PipelineConfig, PipelineReport, partition, run_pipeline
from .local_model import LocalModel, LocalParams, build_local_model, deserialize, serialize
from .regenerate import RegeneratedCluster, inside, random_throw, regenerate_all
from .spatial_index import NeighborhoodIndex, build, range_query

__version__ = "0.1.0"
