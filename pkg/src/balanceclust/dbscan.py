"""Local clustering: DBSCAN with deterministic scan order."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .geometry import as_points
from .spatial_index import NeighborhoodIndex

NOISE = -1


@dataclass(frozen=True)
class ClusterParams:
    eps: float
    min_pts: int

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidParameterError(f"eps must be positive, got {self.eps}")
        if int(self.min_pts) != self.min_pts or self.min_pts < 1:
            raise InvalidParameterError(f"min_pts must be a positive integer, got {self.min_pts}")


@dataclass(frozen=True)
class Clustering:
    labels: np.ndarray
    cluster_count: int

    @property
    def noise_mask(self) -> np.ndarray:
        return self.labels == NOISE

    def sizes(self) -> list[int]:
        return np.bincount(self.labels[self.labels >= 0], minlength=self.cluster_count).tolist()


def dbscan(points, params: ClusterParams) -> Clustering:
    """Cluster ``points`` with DBSCAN.

    A point is core when its eps-neighbourhood, itself included, holds at
    least ``min_pts`` points. Seeds are taken in index order and clusters
    grow breadth-first, so a border point reachable from several clusters
    belongs to whichever was created first.
    """
    pts = as_points(points)
    n = len(pts)
    labels = np.full(n, NOISE, dtype=np.int64)
    if n == 0:
        return Clustering(labels, 0)

    index = NeighborhoodIndex(pts, params.eps)
    neigh = [index.query_radius(pts[i]) for i in range(n)]
    core = np.fromiter((len(nb) >= params.min_pts for nb in neigh), dtype=bool, count=n)

    cluster = 0
    for seed in range(n):
        if labels[seed] != NOISE or not core[seed]:
            continue
        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            i = queue.popleft()
            for j in neigh[i]:
                if labels[j] == NOISE:
                    labels[j] = cluster
                    if core[j]:
                        queue.append(j)
        cluster += 1
    return Clustering(labels, cluster)


# Any callable with this signature can stand in for DBSCAN as the local clusterer.
LocalClusterer = Callable[[np.ndarray, ClusterParams], Clustering]


def cluster_points(points, clustering: Clustering, cluster_id: int) -> np.ndarray:
    """Points labelled ``cluster_id``, in input order."""
    if not 0 <= cluster_id < clustering.cluster_count:
        raise InvalidInputError(f"cluster id {cluster_id} out of range [0, {clustering.cluster_count})")
    pts = as_points(points)
    return pts[clustering.labels == cluster_id]
