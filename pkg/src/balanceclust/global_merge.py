"""Coordinator-side merge of local models into a global model.

The union of all local boundaries is treated as one point set and the cone
(or sphere) test runs again over it, which erases seams where partitions of
one cluster touch. Survivors are grouped into global clusters by connectivity at the
global radius, and every local cluster is attributed to exactly one global
cluster so that cardinalities can be summed.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .boundary import BoundaryParams, BoundarySet, Predicate, balance_field, predicate_mask
from .errors import InvalidInputError, InvalidParameterError, ModelParseError, ModelValidationError
from .regenerate import inside_many
from .local_model import LocalModel, _boundary_to_list, _dumps, boundary_from_list, parse_document
from .spatial_index import NeighborhoodIndex

GLOBAL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class GlobalParams:
    g_nu: float
    g_eps: float
    predicate: Predicate = Predicate.CONE
    rho: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "predicate", Predicate(self.predicate))
        if not 0 < self.g_nu < math.pi / 2:
            raise InvalidParameterError(f"g_nu must lie in (0, pi/2), got {self.g_nu}")
        if not self.g_eps > 0:
            raise InvalidParameterError(f"g_eps must be positive, got {self.g_eps}")

    def boundary_params(self) -> BoundaryParams:
        return BoundaryParams(self.g_eps, self.g_nu, self.rho, self.predicate)

    def to_dict(self) -> dict:
        return {"g_nu": float(self.g_nu), "g_eps": float(self.g_eps), "predicate": self.predicate.value,
                "rho": "auto" if self.rho is None else float(self.rho)}

    @classmethod
    def from_dict(cls, d: dict) -> "GlobalParams":
        rho = d.get("rho", "auto")
        return cls(float(d["g_nu"]), float(d["g_eps"]), d.get("predicate", "cone"),
                   None if rho in (None, "auto") else float(rho))


@dataclass(frozen=True)
class GlobalCluster:
    global_id: int
    boundary: BoundarySet
    cardinality: int
    contributing: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class GlobalModel:
    params: GlobalParams
    clusters: tuple[GlobalCluster, ...] = ()

    @property
    def total_cardinality(self) -> int:
        return sum(c.cardinality for c in self.clusters)

    def global_boundary(self) -> BoundarySet:
        dim = self.clusters[0].boundary.dim if self.clusters else 0
        return BoundarySet.concat([c.boundary for c in self.clusters], dim)

    def cluster_of(self, node_id: int, cluster_id: int) -> int:
        for c in self.clusters:
            if (node_id, cluster_id) in c.contributing:
                return c.global_id
        raise KeyError((node_id, cluster_id))

    def __eq__(self, other):
        if not isinstance(other, GlobalModel):
            return NotImplemented
        return serialize_global(self) == serialize_global(other)


def derive_global_params(models, g_nu: float | None = None, g_eps: float | None = None,
                         predicate: Predicate | str | None = None) -> GlobalParams:
    """Global aperture and radius: the largest local values unless overridden."""
    models = list(models)
    if not models:
        raise InvalidInputError("need at least one local model")
    nu = max(m.params.nu for m in models) if g_nu is None else g_nu
    eps = max(m.params.eps_b for m in models) if g_eps is None else g_eps
    pred = models[0].params.predicate if predicate is None else predicate
    return GlobalParams(nu, eps, pred)


def _components(points, radius):
    n = len(points)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    index = NeighborhoodIndex(points, radius)
    rows, cols = [], []
    for i in range(n):
        nb = index.neighbours_of(i)
        rows.append(np.full(nb.size, i))
        cols.append(nb)
    r, c = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(r.size), (r, c)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return labels


def _encloses_far_field(b: BoundarySet) -> bool:
    """True for hole-type outlines, whose Inside region is unbounded."""
    rect_lo, rect_hi = b.points.min(axis=0), b.points.max(axis=0)
    centre = (rect_lo + rect_hi) / 2
    reach = 10 * (float(np.max(rect_hi - rect_lo)) + 1.0)
    eye = np.eye(b.dim)
    probes = centre + reach * np.concatenate([eye, -eye])
    return inside_many(probes, b).mean() > 0.5


def _absorb_enclosed(gb: BoundarySet, comp: np.ndarray) -> np.ndarray:
    """Fold components lying wholly Inside a larger component into it.

    Fragments of an over-split local clustering leave small groups of
    survivors in the interior of a bigger cluster; they belong to it. A
    candidate sitting in a hole of the group (outside a hole-type member)
    stays separate.
    """
    if not len(comp):
        return comp
    sizes = np.bincount(comp)
    order = sorted(range(len(sizes)), key=lambda c: (-sizes[c], c))
    own = {c: gb.take(np.flatnonzero(comp == c)).canonical() for c in range(len(sizes))}
    target = {}
    holes = {}  # kept component -> hole-type members folded into it
    for c in order:
        pts = own[c].points
        for k, members in holes.items():
            if inside_many(pts, own[k]).all() and all(inside_many(pts, own[h]).all() for h in members):
                target[c] = k
                if _encloses_far_field(own[c]):
                    members.append(c)
                break
        else:
            holes[c] = []
            target[c] = c
    # compact renumbering in order of first appearance
    relabel = {}
    out = np.empty_like(comp)
    for i, c in enumerate(comp):
        out[i] = relabel.setdefault(target[int(c)], len(relabel))
    return out


def merge(models, params: GlobalParams, recompute_balances: bool = False) -> GlobalModel:
    """Merge local models (order-independent).

    The boundary test runs again over the union of all local boundaries at
    ``g_eps``/``g_nu``. Each point keeps the balance vector its node shipped:
    a seam point's vector points across the cut, where the other partition's
    boundary now sits inside its cone, so it is discarded. Balance vectors
    recomputed on the union alone are unreliable (the union is a thin shell,
    empty on both sides) and are only available via ``recompute_balances``.

    Survivors are grouped by ``g_eps`` connectivity, groups lying Inside a
    larger group are folded into it, every local cluster is attributed to
    the group holding the plurality of its surviving points, and
    cardinalities are summed. A group whose survivors span no volume gets
    its contributing local boundaries back so it can still be regenerated.
    """
    models = list(models)
    dims = {c.boundary.dim for m in models for c in m.clusters}
    if len(dims) > 1:
        raise InvalidInputError(f"local models disagree on dimension: {sorted(dims)}")
    cards = {(m.node_id, c.cluster_id): c.representative.cardinality for m in models for c in m.clusters}
    if len(cards) != sum(len(m.clusters) for m in models):
        raise InvalidInputError("duplicate (node_id, cluster_id) pairs across models")
    if not cards:
        return GlobalModel(params, ())
    dim = dims.pop()

    union = BoundarySet.concat([c.boundary for m in models for c in m.clusters], dim).canonical()
    index = NeighborhoodIndex(union.points, params.g_eps)
    balances = balance_field(union.points, params.g_eps, index) if recompute_balances else union.balances
    mask = predicate_mask(union.points, balances, index, params.boundary_params())
    merged = BoundarySet(union.points, balances, union.source_node, union.source_cluster)
    gb_index = np.flatnonzero(mask)
    gb = merged.take(gb_index)

    comp = _absorb_enclosed(gb, _components(gb.points, params.g_eps))
    ncomp = int(comp.max()) + 1 if len(comp) else 0

    # attribute every local cluster to one component
    owner = {}
    for key in sorted(cards):
        sel = (gb.source_node == key[0]) & (gb.source_cluster == key[1])
        if sel.any():
            votes = Counter(comp[sel].tolist())
            best = max(votes.values())
            owner[key] = min(k for k, v in votes.items() if v == best)
    orphans = [k for k in sorted(cards) if k not in owner]
    extra = []  # boundaries of local clusters that vanished completely
    for key in orphans:
        if len(gb):
            own = (union.source_node == key[0]) & (union.source_cluster == key[1])
            d = np.min(np.linalg.norm(gb.points[None, :, :] - union.points[own][:, None, :], axis=2), axis=0)
            nearest = int(np.argmin(d))
            if d[nearest] <= params.g_eps:
                owner[key] = int(comp[nearest])
                continue
        # restore its own boundary as a separate global cluster
        own = np.flatnonzero((union.source_node == key[0]) & (union.source_cluster == key[1]))
        owner[key] = ncomp + len(extra)
        extra.append(merged.take(own))

    # components that no local cluster claimed hand their points to the
    # component owning the points' source cluster
    claimed = set(owner.values())
    point_comp = comp.copy()
    for i in range(len(gb)):
        if point_comp[i] not in claimed:
            point_comp[i] = owner[(int(gb.source_node[i]), int(gb.source_cluster[i]))]

    groups = {}
    for g in sorted(claimed):
        if g < ncomp:
            b = gb.take(np.flatnonzero(point_comp == g))
        else:
            b = extra[g - ncomp]
        members = frozenset(k for k, v in owner.items() if v == g)
        if np.any(np.ptp(b.points, axis=0) == 0):
            # a flat survivor set cannot be regenerated from; fall back to
            # the contributing local boundaries
            own = np.array([(int(n), int(k)) in members for n, k in zip(union.source_node, union.source_cluster)])
            own[gb_index[point_comp != g]] = False
            b = merged.take(np.flatnonzero(own))
        groups[g] = (b.canonical(), members)

    # canonical numbering: by lexicographically smallest boundary point
    ordered = sorted(groups.values(), key=lambda bm: (tuple(bm[0].points[0]), min(bm[1])))
    clusters = tuple(
        GlobalCluster(gid, b, sum(cards[k] for k in members), members)
        for gid, (b, members) in enumerate(ordered)
    )
    return GlobalModel(params, clusters)


def global_to_dict(model: GlobalModel) -> dict:
    return {
        "format_version": GLOBAL_FORMAT_VERSION,
        "kind": "global",
        "params": model.params.to_dict(),
        "clusters": [
            {
                "global_id": int(c.global_id),
                "cardinality": int(c.cardinality),
                "contributing": [[int(n), int(k)] for n, k in sorted(c.contributing)],
                "boundary": [
                    dict(m, node_id=int(n), cluster_id=int(k))
                    for m, n, k in zip(_boundary_to_list(c.boundary), c.boundary.source_node, c.boundary.source_cluster)
                ],
            }
            for c in model.clusters
        ],
    }


def serialize_global(model: GlobalModel) -> bytes:
    return _dumps(global_to_dict(model))


def deserialize_global(data: bytes | str) -> GlobalModel:
    doc = parse_document(data)
    if doc.get("kind") != "global":
        raise ModelParseError("not a global model document")
    try:
        params = GlobalParams.from_dict(doc["params"])
        clusters = []
        for n, c in enumerate(doc["clusters"]):
            where = f"clusters[{n}]"
            items = c["boundary"]
            b = boundary_from_list(items, np.array([m["node_id"] for m in items]),
                                   np.array([m["cluster_id"] for m in items]), where)
            members = frozenset((int(a), int(k)) for a, k in c["contributing"])
            if int(c["cardinality"]) < 1:
                raise ModelValidationError("cardinality positive", where)
            clusters.append(GlobalCluster(int(c["global_id"]), b.canonical(), int(c["cardinality"]), members))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelValidationError):
            raise
        raise ModelParseError(f"malformed global document: {exc}") from None
    return GlobalModel(params, tuple(clusters))
