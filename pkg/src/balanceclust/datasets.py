"""Synthetic 2-D scenes (and d-dimensional blobs/balls) plus CSV I/O."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CsvParseError, InvalidParameterError
from .geometry import as_points


class Kind(str, enum.Enum):
    BLOB = "blob"
    DISK = "disk"
    ANNULUS = "annulus"
    CRESCENT = "crescent"
    RECT_WITH_HOLE = "rect_with_hole"


# shape constants, in units of ``scale``
ANNULUS_INNER = 0.5
BITE_OFFSET = 0.8
BITE_RADIUS = 0.3
RECT_HALF = (1.0, 0.6)
HOLE_RADIUS = 0.3


@dataclass(frozen=True)
class ShapeSpec:
    kind: Kind
    center: tuple = (0.0, 0.0)
    scale: float = 1.0
    rotation: float = 0.0
    count: int = 500
    noise_stddev: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.count < 1:
            raise InvalidParameterError("count must be at least 1")
        if not self.scale > 0:
            raise InvalidParameterError("scale must be positive")
        if self.kind not in (Kind.BLOB, Kind.DISK) and len(self.center) != 2:
            raise InvalidParameterError(f"{self.kind.value} shapes are 2-D only")

    def _to_local(self, pts):
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        x = (np.asarray(pts, dtype=np.float64) - self.center) / self.scale
        if x.shape[1] == 2:
            x = x @ np.array([[c, -s], [s, c]])
        return x

    def _from_local(self, x):
        if x.shape[1] == 2:
            c, s = math.cos(self.rotation), math.sin(self.rotation)
            x = x @ np.array([[c, s], [-s, c]])
        return x * self.scale + np.asarray(self.center)

    def contains(self, pts) -> np.ndarray:
        """Point-in-shape oracle (noise-free shape; BLOB has no support and returns all True)."""
        x = self._to_local(np.atleast_2d(pts))
        r = np.sqrt(np.sum(x * x, axis=1))
        if self.kind is Kind.BLOB:
            return np.ones(len(x), dtype=bool)
        if self.kind is Kind.DISK:
            return r <= 1.0
        if self.kind is Kind.ANNULUS:
            return (r <= 1.0) & (r >= ANNULUS_INNER)
        if self.kind is Kind.CRESCENT:
            bite = np.hypot(x[:, 0] - BITE_OFFSET, x[:, 1])
            return (r <= 1.0) & (bite > BITE_RADIUS)
        hw, hh = RECT_HALF
        return (np.abs(x[:, 0]) <= hw) & (np.abs(x[:, 1]) <= hh) & (r >= HOLE_RADIUS)

    def concave_rim_distance(self, pts) -> np.ndarray:
        """Distance (in world units) to the concave part of the outline.

        Defined for CRESCENT (the bite arc) and RECT_WITH_HOLE / ANNULUS (the
        hole); infinite for convex shapes.
        """
        x = self._to_local(np.atleast_2d(pts))
        if self.kind is Kind.CRESCENT:
            d = np.abs(np.hypot(x[:, 0] - BITE_OFFSET, x[:, 1]) - BITE_RADIUS)
        elif self.kind is Kind.ANNULUS:
            d = np.abs(np.hypot(x[:, 0], x[:, 1]) - ANNULUS_INNER)
        elif self.kind is Kind.RECT_WITH_HOLE:
            d = np.abs(np.hypot(x[:, 0], x[:, 1]) - HOLE_RADIUS)
        else:
            return np.full(len(x), np.inf)
        return d * self.scale

    def sample(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        d = len(self.center)
        if self.kind is Kind.BLOB:
            x = rng.standard_normal((self.count, d))
        else:
            # rejection sampling from the local bounding box
            lo, hi = (-1.0, 1.0)
            kept = []
            total = 0
            while total < self.count:
                cand = rng.uniform(lo, hi, size=(max(64, 2 * (self.count - total)), d))
                r = np.sqrt(np.sum(cand * cand, axis=1))
                if self.kind is Kind.DISK:
                    ok = r <= 1.0
                else:
                    ok = self.contains(self._from_local(cand))
                cand = cand[ok][: self.count - total]
                kept.append(cand)
                total += len(cand)
            x = np.concatenate(kept)
        pts = self._from_local(x)
        if self.noise_stddev > 0:
            pts = pts + rng.normal(0.0, self.noise_stddev, size=pts.shape)
        return pts


def generate(specs) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate samples of every spec; labels are the spec positions."""
    specs = list(specs)
    if not specs:
        return np.zeros((0, 2)), np.zeros(0, dtype=np.int64)
    parts = [s.sample() for s in specs]
    labels = np.concatenate([np.full(len(p), i, dtype=np.int64) for i, p in enumerate(parts)])
    return np.concatenate(parts), labels


def ds1_like(seed: int = 1) -> list[ShapeSpec]:
    """Four clusters: a small disk sitting in the bite of a crescent, two isolated shapes."""
    return [
        ShapeSpec(Kind.CRESCENT, (-2.0, 2.0), 1.5, 0.0, 1600, seed=seed),
        ShapeSpec(Kind.DISK, (-0.78, 2.0), 0.25, 0.0, 400, seed=seed + 1),
        ShapeSpec(Kind.RECT_WITH_HOLE, (2.5, 2.0), 1.2, 0.3, 1200, seed=seed + 2),
        ShapeSpec(Kind.DISK, (1.0, -2.0), 1.0, 0.0, 1000, seed=seed + 3),
    ]


def ds9_like(seed: int = 9) -> list[ShapeSpec]:
    """Three well-separated clusters with convex, hooked and holed outlines."""
    return [
        ShapeSpec(Kind.DISK, (-3.0, 0.0), 1.2, 0.0, 1500, seed=seed),
        ShapeSpec(Kind.CRESCENT, (0.5, 0.0), 1.5, 0.0, 1800, seed=seed + 1),
        ShapeSpec(Kind.RECT_WITH_HOLE, (4.0, 0.0), 1.4, 0.5, 1500, seed=seed + 2),
    ]


def crescent(seed: int = 5, count: int = 2000) -> list[ShapeSpec]:
    return [ShapeSpec(Kind.CRESCENT, (0.0, 0.0), 1.0, 0.0, count, seed=seed)]


def disk(seed: int = 4, count: int = 2000) -> list[ShapeSpec]:
    return [ShapeSpec(Kind.DISK, (0.0, 0.0), 1.0, 0.0, count, seed=seed)]


PRESETS = {"ds1-like": ds1_like, "ds9-like": ds9_like, "crescent": crescent, "disk": disk}


def preset(name: str, seed: int | None = None) -> list[ShapeSpec]:
    try:
        fn = PRESETS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return fn() if seed is None else fn(seed)


def mean_nn_spacing(points) -> float:
    """Mean distance from each point to its nearest other point."""
    from scipy.spatial import cKDTree

    pts = as_points(points)
    d, _ = cKDTree(pts).query(pts, k=2)
    return float(d[:, 1].mean())


def save_csv(points, path, labels=None, header: bool = False) -> None:
    """One point per line; floats written with round-trip precision (``repr``)."""
    pts = as_points(points)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            names = [f"x{i}" for i in range(pts.shape[1])]
            w.writerow(names + (["label"] if labels is not None else []))
        for i, p in enumerate(pts):
            row = [repr(float(c)) for c in p]
            if labels is not None:
                row.append(str(int(labels[i])))
            w.writerow(row)


def load_csv(path, header: bool = False, labels: bool = False):
    """Read points written by :func:`save_csv`.

    With ``labels=True`` the last column is parsed as an integer label and
    ``(points, labels)`` is returned.
    """
    rows, labs = [], []
    width = None
    with open(Path(path), newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1 and header:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise CsvParseError(f"expected {width} fields, got {len(row)}", lineno)
            coords = row[:-1] if labels else row
            try:
                rows.append([float(c) for c in coords])
                if labels:
                    labs.append(int(row[-1]))
            except ValueError as exc:
                raise CsvParseError(str(exc), lineno) from None
            if not all(math.isfinite(c) for c in rows[-1]):
                raise CsvParseError("non-finite coordinate", lineno)
    dim = (width - 1 if labels else width) if width else 0
    pts = np.asarray(rows, dtype=np.float64).reshape(len(rows), dim)
    if labels:
        return pts, np.asarray(labs, dtype=np.int64)
    return pts


def csv_bytes(points) -> int:
    """Size of the points in the CSV encoding used by :func:`save_csv`."""
    pts = as_points(points)
    return sum(len(",".join(repr(float(c)) for c in p)) + 1 for p in pts)
