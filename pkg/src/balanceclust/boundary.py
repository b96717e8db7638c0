"""Balance vectors and boundary-point detection.

For a point ``p`` of a cluster, the displacement vector sums ``p - q`` over the
cluster neighbours ``q`` within ``eps_b``; normalised, it is the balance vector
and points toward the emptiest side of the neighbourhood. ``p`` is a boundary
point when nothing of the cluster lies "in front" of it along that direction:

* CONE: no neighbour falls inside the infinite cone with apex ``p``, axis
  ``b_p`` and half-aperture ``nu``.
* SPHERE: the ball of radius ``eps_b`` centred at ``p + rho * b_p`` holds no
  cluster point.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .geometry import as_point, as_points, normalize, normalize_rows
from .spatial_index import NeighborhoodIndex

DEFAULT_NU = math.pi / 6


class Predicate(str, enum.Enum):
    CONE = "cone"
    SPHERE = "sphere"


class RhoMode(str, enum.Enum):
    GLOBAL = "global"
    PER_POINT = "per_point"


@dataclass(frozen=True)
class BoundaryParams:
    """Tuning for :func:`detect_boundary`.

    ``rho=None`` means automatic: twice the mean furthest-neighbour distance
    (``rho_mode="global"``) or twice each point's own furthest-neighbour
    distance (``rho_mode="per_point"``). Only used by the SPHERE predicate.
    """

    eps_b: float
    nu: float = DEFAULT_NU
    rho: float | None = None
    predicate: Predicate = Predicate.CONE
    rho_mode: RhoMode = RhoMode.GLOBAL

    def __post_init__(self):
        object.__setattr__(self, "predicate", Predicate(self.predicate))
        object.__setattr__(self, "rho_mode", RhoMode(self.rho_mode))
        if not self.eps_b > 0:
            raise InvalidParameterError(f"eps_b must be positive, got {self.eps_b}")
        if not 0 < self.nu < math.pi / 2:
            raise InvalidParameterError(f"nu must lie in (0, pi/2), got {self.nu}")
        if self.rho is not None and not self.rho > 0:
            raise InvalidParameterError(f"rho must be positive, got {self.rho}")


class BoundaryPoint(NamedTuple):
    point: np.ndarray
    balance: np.ndarray
    source_node: int
    source_cluster: int


@dataclass(frozen=True, eq=False)
class BoundarySet:
    """Boundary points of one or more clusters, stored column-wise."""

    points: np.ndarray
    balances: np.ndarray
    source_node: np.ndarray
    source_cluster: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            pts = pts.reshape(len(pts), -1) if pts.size else np.zeros((0, 0))
        bal = np.asarray(self.balances, dtype=np.float64).reshape(pts.shape)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "balances", bal)
        object.__setattr__(self, "source_node", np.asarray(self.source_node, dtype=np.int64).reshape(-1))
        object.__setattr__(self, "source_cluster", np.asarray(self.source_cluster, dtype=np.int64).reshape(-1))
        if not (len(self.source_node) == len(self.source_cluster) == len(pts)):
            raise InvalidInputError("boundary columns must have equal length")

    @classmethod
    def empty(cls, dim: int) -> "BoundarySet":
        return cls(np.zeros((0, dim)), np.zeros((0, dim)), [], [])

    @classmethod
    def concat(cls, sets, dim: int | None = None) -> "BoundarySet":
        sets = list(sets)
        if not sets:
            return cls.empty(dim or 0)
        return cls(
            np.concatenate([s.points for s in sets]),
            np.concatenate([s.balances for s in sets]),
            np.concatenate([s.source_node for s in sets]),
            np.concatenate([s.source_cluster for s in sets]),
        )

    def __len__(self):
        return len(self.points)

    def __iter__(self) -> Iterator[BoundaryPoint]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i) -> BoundaryPoint:
        return BoundaryPoint(self.points[i], self.balances[i], int(self.source_node[i]), int(self.source_cluster[i]))

    def __eq__(self, other):
        if not isinstance(other, BoundarySet):
            return NotImplemented
        return (
            self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.balances, other.balances)
            and np.array_equal(self.source_node, other.source_node)
            and np.array_equal(self.source_cluster, other.source_cluster)
        )

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def take(self, idx) -> "BoundarySet":
        idx = np.asarray(idx)
        return BoundarySet(self.points[idx], self.balances[idx], self.source_node[idx], self.source_cluster[idx])

    def canonical(self) -> "BoundarySet":
        """Sorted lexicographically by coordinates, then node id, then cluster id."""
        if len(self) == 0:
            return self
        keys = (self.source_cluster, self.source_node) + tuple(self.points.T[::-1])
        return self.take(np.lexsort(keys))


def displacement_vector(p, neighbours) -> np.ndarray:
    """Sum of ``p - q`` over the neighbours ``q`` (zero for no neighbours)."""
    p = as_point(p)
    nb = as_points(neighbours, dim=p.shape[0])
    if not len(nb):
        return np.zeros_like(p)
    return len(nb) * p - nb.sum(axis=0)


def _balance_from(points, neighbours) -> np.ndarray:
    out = np.zeros_like(points)
    for i, nb in enumerate(neighbours):
        if nb.size:
            out[i] = normalize(displacement_vector(points[i], points[nb]))
    return out


def balance_field(cluster, eps_b: float, index: NeighborhoodIndex | None = None) -> np.ndarray:
    """Balance vector of every cluster point, neighbourhoods taken within the cluster."""
    pts = as_points(cluster)
    if index is None:
        index = NeighborhoodIndex(pts, eps_b)
    return _balance_from(pts, index.all_neighbours())


def is_boundary_cone(p, b, neighbours, nu: float) -> bool:
    """True when no neighbour lies within angle ``nu`` of the balance direction.

    A point without neighbours outlines itself and is a boundary point; a
    point with neighbours but a zero balance vector is interior.
    """
    p = as_point(p)
    nb = as_points(neighbours, dim=p.shape[0])
    if not len(nb):
        return True
    b = np.asarray(b, dtype=np.float64)
    if not np.any(b):
        return False
    cosines = normalize_rows(nb - p) @ b
    return bool(np.all(cosines < math.cos(nu)))


def is_boundary_sphere(p, b, index: NeighborhoodIndex, eps_b: float, rho: float) -> bool:
    """True when the ``eps_b`` ball around ``p + rho * b`` holds no cluster point."""
    b = np.asarray(b, dtype=np.float64)
    if not np.any(b):
        return False
    probe = as_point(p) + rho * b
    return index.query_radius(probe, eps_b).size == 0


def _furthest(points, neighbours) -> np.ndarray:
    far = np.full(len(points), np.nan)
    for i, nb in enumerate(neighbours):
        if nb.size:
            far[i] = np.sqrt(np.max(np.sum((points[nb] - points[i]) ** 2, axis=1)))
    return far


def auto_rho(cluster, eps_b: float, per_point: bool = False, index: NeighborhoodIndex | None = None):
    """Sphere offset: twice the mean distance from a point to its furthest neighbour.

    Points without neighbours are skipped. With ``per_point`` an array of
    per-point offsets (twice each point's own furthest distance) is returned,
    NaN where a point has no neighbour.
    """
    pts = as_points(cluster)
    if index is None:
        index = NeighborhoodIndex(pts, eps_b)
    far = _furthest(pts, index.all_neighbours())
    if np.all(np.isnan(far)):
        raise InvalidInputError("no point has a neighbour within eps_b; rho is undefined")
    if per_point:
        return 2.0 * far
    return 2.0 * float(np.nanmean(far))


def predicate_mask(points, balances, index: NeighborhoodIndex, params: BoundaryParams,
                   neighbours=None) -> np.ndarray:
    """Evaluate the chosen predicate for every point with the given balance vectors.

    ``index`` must be built over ``points`` at radius ``params.eps_b``. Every
    decision depends only on the supplied balances, never on other discards,
    so evaluation order is irrelevant.
    """
    pts = as_points(points)
    n = len(pts)
    if neighbours is None:
        neighbours = index.all_neighbours()
    mask = np.zeros(n, dtype=bool)
    if params.predicate is Predicate.CONE:
        cos_nu = math.cos(params.nu)
        for i, nb in enumerate(neighbours):
            if not nb.size:
                mask[i] = True
            elif np.any(balances[i]):
                mask[i] = bool(np.all(normalize_rows(pts[nb] - pts[i]) @ balances[i] < cos_nu))
        return mask
    if params.rho is not None:
        rho = np.full(n, params.rho)
    elif all(nb.size == 0 for nb in neighbours):
        # every balance vector is zero, nothing can pass
        rho = np.zeros(n)
    else:
        far = _furthest(pts, neighbours)
        rho = 2.0 * far if params.rho_mode is RhoMode.PER_POINT else np.full(n, 2.0 * np.nanmean(far))
    for i in range(n):
        mask[i] = is_boundary_sphere(pts[i], balances[i], index, params.eps_b, rho[i])
    return mask


def boundary_mask(cluster, params: BoundaryParams, index: NeighborhoodIndex | None = None):
    """Balance field plus predicate for every point; returns ``(mask, balances)``."""
    pts = as_points(cluster)
    if index is None:
        index = NeighborhoodIndex(pts, params.eps_b)
    neighbours = index.all_neighbours()
    balances = _balance_from(pts, neighbours)
    return predicate_mask(pts, balances, index, params, neighbours), balances


def detect_boundary(cluster, params: BoundaryParams, node_id: int = 0, cluster_id: int = 0) -> BoundarySet:
    """Boundary points of ``cluster`` with their balance vectors and provenance.

    Starts from the whole cluster and discards every point with some
    neighbour in front of it (CONE) or a non-empty probe ball (SPHERE).
    """
    if not isinstance(params, BoundaryParams):
        raise InvalidParameterError("params must be a BoundaryParams instance")
    pts = as_points(cluster)
    mask, balances = boundary_mask(pts, params)
    k = int(mask.sum())
    return BoundarySet(pts[mask], balances[mask], np.full(k, node_id), np.full(k, cluster_id))
