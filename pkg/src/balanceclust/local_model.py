"""Per-node local model: cluster boundaries, representatives and parameters.

The serialized document is the only thing a node ships to the coordinator.
It is canonical JSON: sorted keys, clusters ordered by id, boundary members
ordered by coordinates, floats in shortest round-trip form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import DEFAULT_NU, BoundaryParams, BoundarySet, Predicate, RhoMode, detect_boundary
from .dbscan import ClusterParams, LocalClusterer, cluster_points, dbscan
from .errors import InvalidParameterError, ModelParseError, ModelValidationError, UnsupportedVersionError
from .geometry import as_points
from .spatial_index import NeighborhoodIndex

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClusterRepresentative:
    cardinality: int
    mean_density: float


@dataclass(frozen=True)
class LocalParams:
    """Everything a node used to build its model; ``eps_b=None`` reuses ``eps``."""

    eps: float
    min_pts: int
    eps_b: float | None = None
    nu: float = DEFAULT_NU
    predicate: Predicate = Predicate.CONE
    rho: float | None = None
    rho_mode: RhoMode = RhoMode.GLOBAL

    def __post_init__(self):
        if self.eps_b is None:
            object.__setattr__(self, "eps_b", self.eps)
        object.__setattr__(self, "predicate", Predicate(self.predicate))
        object.__setattr__(self, "rho_mode", RhoMode(self.rho_mode))
        # reuse the component validators
        self.cluster_params()
        self.boundary_params()

    def cluster_params(self) -> ClusterParams:
        return ClusterParams(self.eps, self.min_pts)

    def boundary_params(self) -> BoundaryParams:
        return BoundaryParams(self.eps_b, self.nu, self.rho, self.predicate, self.rho_mode)

    def to_dict(self) -> dict:
        return {
            "eps": float(self.eps),
            "min_pts": int(self.min_pts),
            "eps_b": float(self.eps_b),
            "nu": float(self.nu),
            "predicate": self.predicate.value,
            "rho": "auto" if self.rho is None else float(self.rho),
            "rho_mode": self.rho_mode.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LocalParams":
        rho = d.get("rho", "auto")
        return cls(
            eps=float(d["eps"]),
            min_pts=int(d["min_pts"]),
            eps_b=float(d["eps_b"]) if d.get("eps_b") is not None else None,
            nu=float(d.get("nu", DEFAULT_NU)),
            predicate=d.get("predicate", "cone"),
            rho=None if rho in (None, "auto") else float(rho),
            rho_mode=d.get("rho_mode", "global"),
        )


@dataclass(frozen=True)
class LocalCluster:
    cluster_id: int
    representative: ClusterRepresentative
    boundary: BoundarySet


@dataclass(frozen=True)
class LocalModel:
    node_id: int
    params: LocalParams
    clusters: tuple[LocalCluster, ...] = field(default_factory=tuple)

    @property
    def boundary_count(self) -> int:
        return sum(len(c.boundary) for c in self.clusters)

    @property
    def total_cardinality(self) -> int:
        return sum(c.representative.cardinality for c in self.clusters)

    def union_boundary(self) -> BoundarySet:
        dim = self.clusters[0].boundary.dim if self.clusters else 0
        return BoundarySet.concat([c.boundary for c in self.clusters], dim)

    def __eq__(self, other):
        if not isinstance(other, LocalModel):
            return NotImplemented
        return (
            self.node_id == other.node_id
            and self.params == other.params
            and len(self.clusters) == len(other.clusters)
            and all(a == b for a, b in zip(self.clusters, other.clusters))
        )


def mean_density(points, radius: float) -> float:
    """Average neighbourhood size at ``radius``, each point counting itself."""
    pts = as_points(points)
    index = NeighborhoodIndex(pts, radius)
    return float(np.mean([index.query_radius(p).size for p in pts]))


def build_local_model(partition, params: LocalParams, node_id: int = 0,
                      clusterer: LocalClusterer = dbscan) -> LocalModel:
    """Cluster one partition and summarise every cluster by its boundary.

    Noise is dropped. If a cluster yields no boundary point at all (every
    point has a perfectly symmetric neighbourhood) the whole cluster is kept
    as its boundary so that its cardinality is not lost.
    """
    pts = as_points(partition)
    clustering = clusterer(pts, params.cluster_params())
    bparams = params.boundary_params()
    clusters = []
    for cid in range(clustering.cluster_count):
        members = cluster_points(pts, clustering, cid)
        boundary = detect_boundary(members, bparams, node_id, cid)
        if len(boundary) == 0:
            boundary = BoundarySet(members, np.zeros_like(members), np.full(len(members), node_id),
                                   np.full(len(members), cid))
        rep = ClusterRepresentative(len(members), mean_density(members, params.eps_b))
        clusters.append(LocalCluster(cid, rep, boundary.canonical()))
    return LocalModel(node_id, params, tuple(clusters))


def _boundary_to_list(b: BoundarySet) -> list:
    b = b.canonical()
    return [{"point": [float(x) for x in p], "balance": [float(x) for x in v]}
            for p, v in zip(b.points, b.balances)]


def _dumps(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False).encode("utf-8")


def model_to_dict(model: LocalModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "node_id": int(model.node_id),
        "params": model.params.to_dict(),
        "clusters": [
            {
                "cluster_id": int(c.cluster_id),
                "cardinality": int(c.representative.cardinality),
                "mean_density": float(c.representative.mean_density),
                "boundary": _boundary_to_list(c.boundary),
            }
            for c in sorted(model.clusters, key=lambda c: c.cluster_id)
        ],
    }


def serialize(model: LocalModel) -> bytes:
    return _dumps(model_to_dict(model))


def parse_document(data: bytes | str) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelParseError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ModelParseError("top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")
    return doc


def boundary_from_list(items, node_id, cluster_id, where: str) -> BoundarySet:
    try:
        pts = np.array([m["point"] for m in items], dtype=np.float64)
        bal = np.array([m["balance"] for m in items], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelParseError(f"{where}: malformed boundary member ({exc})") from None
    if pts.ndim != 2 or bal.shape != pts.shape:
        raise ModelValidationError("boundary points and balances share one dimension", where)
    norms = np.linalg.norm(bal, axis=1)
    if np.any((np.abs(norms - 1) > 1e-9) & (norms != 0)):
        raise ModelValidationError("balance vectors are unit-length or zero", where)
    k = len(pts)
    node = node_id if np.ndim(node_id) else np.full(k, node_id)
    cl = cluster_id if np.ndim(cluster_id) else np.full(k, cluster_id)
    return BoundarySet(pts, bal, node, cl)


def deserialize(data: bytes | str) -> LocalModel:
    """Parse and validate a local model document."""
    doc = parse_document(data)
    try:
        node_id = int(doc["node_id"])
        params = LocalParams.from_dict(doc["params"])
        raw_clusters = doc["clusters"]
    except KeyError as exc:
        raise ModelParseError(f"missing field {exc}") from None
    except InvalidParameterError as exc:
        raise ModelValidationError("parameters within range", str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"malformed field: {exc}") from None

    clusters, seen, dim = [], set(), None
    for n, c in enumerate(raw_clusters):
        where = f"clusters[{n}]"
        try:
            cid = int(c["cluster_id"])
            card = int(c["cardinality"])
            dens = float(c["mean_density"])
            items = c["boundary"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelParseError(f"{where}: malformed cluster ({exc})") from None
        if cid in seen:
            raise ModelValidationError("cluster ids unique within a model", f"{where} repeats id {cid}")
        seen.add(cid)
        if card < 1 or not (math.isfinite(dens) and dens >= 1):
            raise ModelValidationError("cardinality >= 1 and mean_density >= 1", where)
        if not items:
            raise ModelValidationError("each boundary nonempty", where)
        if len(items) > card:
            raise ModelValidationError("boundary cardinality <= representative cardinality",
                                       f"{where}: {len(items)} > {card}")
        boundary = boundary_from_list(items, node_id, cid, where)
        if dim is None:
            dim = boundary.dim
        elif boundary.dim != dim:
            raise ModelValidationError("all points share one dimension", where)
        clusters.append(LocalCluster(cid, ClusterRepresentative(card, dens), boundary.canonical()))
    clusters.sort(key=lambda c: c.cluster_id)
    return LocalModel(node_id, params, tuple(clusters))
