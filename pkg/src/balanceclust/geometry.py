"""Dimension-generic vector helpers, hyper-rectangles and uniform sampling.

Points are plain float64 arrays of shape ``(d,)``; point sets are ``(n, d)``.
The random source everywhere is a :class:`numpy.random.Generator`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

RandomSource = np.random.Generator


def make_rng(seed) -> RandomSource:
    """Seedable deterministic generator (``seed`` may be an int or int sequence)."""
    return np.random.default_rng(seed)


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise InvalidInputError(f"a point must be a non-empty 1-D coordinate vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("point coordinates must be finite")
    return a


def as_points(points, dim: int | None = None) -> np.ndarray:
    """Coerce to an ``(n, d)`` float64 array, validating finiteness and dimension.

    An empty sequence becomes an array of shape ``(0, dim or 0)``.
    """
    a = np.asarray(points, dtype=np.float64)
    if a.size == 0:
        return np.zeros((0, dim or (a.shape[1] if a.ndim == 2 else 0)))
    if a.ndim == 1:
        raise InvalidInputError("expected a sequence of points, got a single vector")
    if a.ndim != 2:
        raise InvalidInputError(f"expected an (n, d) array of points, got shape {a.shape}")
    if dim is not None and a.shape[1] != dim:
        raise InvalidInputError(f"dimension mismatch: expected {dim}, got {a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("point coordinates must be finite")
    return a


def _pair(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return u, v


def dist(p, q) -> float:
    """Euclidean distance."""
    p, q = _pair(p, q)
    return float(np.sqrt(np.sum((p - q) ** 2)))


def dot(u, v) -> float:
    u, v = _pair(u, v)
    return float(np.dot(u, v))


def normalize(v) -> np.ndarray:
    """Unit vector along ``v``; the zero vector maps to itself."""
    v = np.asarray(v, dtype=np.float64)
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale > 0:
        # rescale first so tiny components do not underflow when squared
        w = v / scale
        return w / np.sqrt(np.sum(w * w))
    return np.zeros_like(v)


def normalize_rows(vs: np.ndarray) -> np.ndarray:
    """Row-wise :func:`normalize`; zero rows stay exactly zero."""
    vs = np.asarray(vs, dtype=np.float64)
    if vs.size == 0:
        return np.zeros_like(vs)
    scale = np.max(np.abs(vs), axis=-1, keepdims=True)
    w = np.zeros_like(vs)
    np.divide(vs, scale, out=w, where=scale > 0)
    norms = np.sqrt(np.sum(w * w, axis=-1, keepdims=True))
    out = np.zeros_like(vs)
    np.divide(w, norms, out=out, where=norms > 0)
    return out


@dataclass(frozen=True)
class HyperRect:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidInputError("lower and upper corners must have equal dimension")
        if np.any(lo > hi):
            raise InvalidInputError("lower corner exceeds upper corner on some axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)


def meh(points) -> HyperRect:
    """Minimal enclosing hyper-rectangle: per-axis min and max of ``points``."""
    pts = as_points(points)
    if len(pts) == 0:
        raise InvalidInputError("cannot enclose an empty point set")
    return HyperRect(pts.min(axis=0), pts.max(axis=0))


def sample_uniform(rect: HyperRect, rng: RandomSource, size: int | None = None) -> np.ndarray:
    """Uniform draw(s) inside ``rect``.

    Returns one point of shape ``(d,)``, or ``(size, d)`` when ``size`` is given.
    Zero-width axes return the fixed coordinate exactly.
    """
    shape = (rect.dim,) if size is None else (size, rect.dim)
    u = rng.random(shape)
    x = rect.lower + u * rect.widths
    # guard against lower + 1*width rounding past upper
    return np.minimum(np.maximum(x, rect.lower), rect.upper)
