"""Uniform-grid index for inclusive epsilon-radius range queries."""
from __future__ import annotations

import itertools
from collections import defaultdict

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .geometry import as_point, as_points

# widen the per-axis candidate window so rounding in the cell arithmetic can
# never drop a point sitting exactly at distance eps
_SLACK = 1e-9


class NeighborhoodIndex:
    """Points bucketed into cubic cells of width ``eps``.

    Each point lives in exactly one cell. A query inspects the cells that
    overlap the axis-aligned box of half-width ``eps`` around the query point
    and filters candidates by exact Euclidean distance, so the answer is
    identical to a linear scan.
    """

    def __init__(self, points, eps: float):
        if not eps > 0:
            raise InvalidParameterError(f"eps must be positive, got {eps}")
        self.eps = float(eps)
        self.points = as_points(points)
        self.dim = self.points.shape[1]
        self.origin = self.points.min(axis=0) if len(self.points) else np.zeros(self.dim)
        keys = self._cell_of(self.points)
        cells = defaultdict(list)
        for i, key in enumerate(map(tuple, keys)):
            cells[key].append(i)
        self.cells = {k: np.asarray(v, dtype=np.intp) for k, v in cells.items()}

    def __len__(self):
        return len(self.points)

    def _cell_of(self, pts):
        return np.floor((pts - self.origin) / self.eps).astype(np.int64)

    def _candidates(self, p):
        reach = self.eps * (1 + _SLACK)
        lo = np.floor((p - reach - self.origin) / self.eps).astype(np.int64)
        hi = np.floor((p + reach - self.origin) / self.eps).astype(np.int64)
        ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
        found = [self.cells[k] for k in itertools.product(*ranges) if k in self.cells]
        if not found:
            return np.zeros(0, dtype=np.intp)
        return np.concatenate(found)

    def query_radius(self, p, radius: float | None = None) -> np.ndarray:
        """Sorted indices within ``radius`` (default ``eps``, must not exceed it)."""
        p = as_point(p)
        if p.shape[0] != self.dim and len(self.points):
            raise InvalidInputError(f"dimension mismatch: index is {self.dim}-D, query is {p.shape[0]}-D")
        r = self.eps if radius is None else float(radius)
        if r > self.eps:
            raise InvalidParameterError("query radius may not exceed the index cell width")
        if not len(self.points):
            return np.zeros(0, dtype=np.intp)
        cand = self._candidates(p)
        if cand.size == 0:
            return cand
        d = np.sqrt(np.sum((self.points[cand] - p) ** 2, axis=1))
        return np.sort(cand[d <= r])

    def range_query(self, p, exclude_self: bool = False) -> set[int]:
        """Indices of stored points within ``eps`` of ``p`` (inclusive).

        With ``exclude_self`` the stored points coinciding with ``p`` are left
        out; use :meth:`neighbours_of` to drop exactly one stored index.
        """
        idx = self.query_radius(p)
        if exclude_self and idx.size:
            p = np.asarray(p, dtype=np.float64)
            idx = idx[np.any(self.points[idx] != p, axis=1)]
        return set(idx.tolist())

    def neighbours_of(self, i: int) -> np.ndarray:
        """Indices within ``eps`` of stored point ``i``, excluding ``i`` itself."""
        idx = self.query_radius(self.points[i])
        return idx[idx != i]

    def all_neighbours(self) -> list[np.ndarray]:
        return [self.neighbours_of(i) for i in range(len(self.points))]


def build(points, eps: float) -> NeighborhoodIndex:
    return NeighborhoodIndex(points, eps)


def range_query(index: NeighborhoodIndex, p, exclude_self: bool = False) -> set[int]:
    return index.range_query(p, exclude_self=exclude_self)

