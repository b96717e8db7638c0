"""Server-side regeneration of representative points inside merged boundaries."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundarySet
from .errors import InvalidInputError, RegenerationStalledError
from .geometry import HyperRect, RandomSource, as_points, make_rng, meh, sample_uniform

DEFAULT_MAX_ATTEMPTS_FACTOR = 1000
_BATCH = 1024


class Strategy(str, enum.Enum):
    RANDOM_THROW = "random_throw"
    GRID = "grid"
    PERTURBED_GRID = "perturbed_grid"


@dataclass
class RegeneratedCluster:
    global_id: int
    points: np.ndarray
    target_cardinality: int
    attempts: int = 0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _nearest(boundary: BoundarySet, q: np.ndarray) -> np.ndarray:
    # brute force: argmin returns the first minimum, i.e. the lowest index in
    # canonical order, which is the tie-break rule
    out = np.empty(len(q), dtype=np.intp)
    step = max(1, 2_000_000 // max(1, len(boundary)))
    for s in range(0, len(q), step):
        block = q[s:s + step]
        d2 = np.sum((block[:, None, :] - boundary.points[None, :, :]) ** 2, axis=2)
        out[s:s + step] = np.argmin(d2, axis=1)
    return out


def inside_many(q, boundary: BoundarySet) -> np.ndarray:
    """Vectorised :func:`inside` for an ``(n, d)`` array of probes.

    ``boundary`` must already be in canonical order for the tie-break rule to
    hold; :class:`GlobalModel` clusters always are.
    """
    if len(boundary) == 0:
        raise InvalidInputError("Inside is undefined for an empty boundary")
    q = as_points(q, dim=boundary.dim)
    if not len(q):
        return np.zeros(0, dtype=bool)
    j = _nearest(boundary, q)
    return np.einsum("ij,ij->i", boundary.points[j] - q, boundary.balances[j]) > 0


def inside(q, boundary: BoundarySet) -> bool:
    """True when ``q`` lies behind its nearest boundary point's balance vector."""
    return bool(inside_many(np.atleast_2d(np.asarray(q, dtype=np.float64)), boundary.canonical())[0])


def random_throw(boundary: BoundarySet, m: int, rng: RandomSource,
                 max_attempts_factor: int = DEFAULT_MAX_ATTEMPTS_FACTOR,
                 global_id: int = 0) -> RegeneratedCluster:
    """Rejection-sample ``m`` points in the boundary's bounding box that pass Inside.

    Draws happen in fixed-size batches and are consumed in order, so the
    result is a pure function of (boundary, m, rng state).
    """
    if m < 0:
        raise InvalidInputError("m must be non-negative")
    if len(boundary) == 0:
        raise InvalidInputError("cannot regenerate from an empty boundary")
    if m == 0:
        return RegeneratedCluster(global_id, np.zeros((0, boundary.dim)), 0)
    b = boundary.canonical()
    rect: HyperRect = meh(b.points)
    budget = max_attempts_factor * m
    accepted, attempts, total = [], 0, 0
    while total < m:
        if attempts >= budget:
            raise RegenerationStalledError(total, m, attempts)
        n = min(_BATCH, budget - attempts)
        x = sample_uniform(rect, rng, size=n)
        ok = inside_many(x, b)
        hits = np.flatnonzero(ok)
        need = m - total
        if hits.size >= need:
            attempts += int(hits[need - 1]) + 1
            accepted.append(x[hits[:need]])
            total = m
        else:
            attempts += n
            accepted.append(x[hits])
            total += hits.size
    return RegeneratedCluster(global_id, np.concatenate(accepted), m, attempts)


def cluster_rng(seed: int, global_id: int) -> RandomSource:
    """Independent stream per global cluster, unaffected by cluster order."""
    return make_rng([int(seed), int(global_id)])


def regenerate_all(global_model, seed: int, strategy: Strategy | str = Strategy.RANDOM_THROW,
                   max_attempts_factor: int = DEFAULT_MAX_ATTEMPTS_FACTOR) -> list[RegeneratedCluster]:
    """One regenerated cluster per global cluster, target size = its cardinality.

    A stalled cluster is reported with an empty point set and its error text;
    the remaining clusters are still produced.
    """
    strategy = Strategy(strategy)
    if strategy is not Strategy.RANDOM_THROW:
        raise NotImplementedError(f"regeneration strategy {strategy.value!r} is not available yet")
    out = []
    for c in global_model.clusters:
        try:
            out.append(random_throw(c.boundary, c.cardinality, cluster_rng(seed, c.global_id),
                                    max_attempts_factor, c.global_id))
        except RegenerationStalledError as exc:
            out.append(RegeneratedCluster(c.global_id, np.zeros((0, c.boundary.dim)), c.cardinality,
                                          exc.attempts, str(exc)))
    return out
