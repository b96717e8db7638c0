"""Quality measures for a distributed run.

Regenerated points are synthetic, so similarity is judged on outlines
(Hausdorff distance between boundaries) and on membership (how many original
points fall Inside the merged boundary), not on point identity.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .boundary import BoundarySet
from .errors import InvalidInputError
from .geometry import as_points, meh
from .local_model import build_local_model
from .regenerate import inside_many
from .spatial_index import NeighborhoodIndex


@dataclass(frozen=True)
class QualityReport:
    coverage: float
    cardinality_error: float
    boundary_hausdorff: float
    compression_ratio: float
    density_cv: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def csv_header() -> str:
        return ",".join(QualityReport.__dataclass_fields__) + "\n"

    def csv_row(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow([repr(float(v)) for v in asdict(self).values()])
        return buf.getvalue()


def _pts(x):
    return x.points if isinstance(x, BoundarySet) else as_points(x)


def coverage(original, boundary: BoundarySet) -> float:
    """Fraction of ``original`` points that are Inside ``boundary``."""
    pts = as_points(original)
    if not len(pts):
        raise InvalidInputError("coverage of an empty point set is undefined")
    if len(boundary) == 0:
        raise InvalidInputError("coverage against an empty boundary is undefined")
    return float(inside_many(pts, boundary.canonical()).mean())


def _directed(a, b):
    worst = 0.0
    step = max(1, 4_000_000 // max(1, len(b)))
    for s in range(0, len(a), step):
        d2 = np.sum((a[s:s + step, None, :] - b[None, :, :]) ** 2, axis=2)
        worst = max(worst, float(np.sqrt(d2.min(axis=1).max())))
    return worst


def boundary_hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two boundary (or point) sets."""
    pa, pb = _pts(a), _pts(b)
    if not len(pa) or not len(pb):
        raise InvalidInputError("Hausdorff distance needs two non-empty sets")
    if pa.shape[1] != pb.shape[1]:
        raise InvalidInputError("dimension mismatch")
    return max(_directed(pa, pb), _directed(pb, pa))


def density_cv(points, radius: float) -> float:
    """Coefficient of variation of neighbourhood counts (self included) at ``radius``."""
    pts = as_points(points)
    if len(pts) < 2:
        raise InvalidInputError("density variation needs at least two points")
    index = NeighborhoodIndex(pts, radius)
    counts = np.array([index.query_radius(p).size for p in pts], dtype=np.float64)
    return float(counts.std() / counts.mean())


def grid_fill(boundary: BoundarySet, m: int, refine: int = 3) -> np.ndarray:
    """Regular-lattice stand-in for regeneration: lattice nodes inside ``boundary``.

    The lattice step is adjusted so that roughly ``m`` nodes pass Inside;
    used as the constant-density baseline for :func:`density_cv`.
    """
    b = boundary.canonical()
    rect = meh(b.points)
    widths = np.where(rect.widths > 0, rect.widths, 1.0)
    volume = float(np.prod(widths))
    frac = 1.0
    pts = np.zeros((0, b.dim))
    for _ in range(refine):
        h = (volume * frac / m) ** (1.0 / b.dim)
        axes = [np.arange(lo + h / 2, hi, h) if hi > lo else np.array([lo])
                for lo, hi in zip(rect.lower, rect.upper)]
        lattice = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, b.dim)
        ok = inside_many(lattice, b)
        pts = lattice[ok]
        frac = max(ok.mean(), 1.0 / len(lattice))
    return pts


def evaluate_pipeline(report, points, labels) -> QualityReport:
    """Score a finished run against the data it started from.

    ``labels`` are ground-truth cluster labels; negative labels are noise and
    ignored for coverage. Each true cluster is matched to the global cluster
    whose boundary covers most of it.
    """
    pts = as_points(points)
    labels = np.asarray(labels)
    g = report.final_global
    if not g.clusters:
        raise InvalidInputError("the run produced no global cluster")

    covered = total = 0
    for lab in np.unique(labels[labels >= 0]):
        members = pts[labels == lab]
        best = max(int(inside_many(members, c.boundary).sum()) for c in g.clusters)
        covered += best
        total += len(members)
    cov = covered / total if total else 0.0

    local_total = sum(m.total_cardinality for m in report.local_models)
    regen_total = sum(len(r.points) for r in report.regenerated)
    card_err = abs(regen_total - local_total) / local_total if local_total else 0.0

    central = build_local_model(pts, report.local_models[0].params, node_id=0)
    if central.clusters and len(g.global_boundary()):
        hd = boundary_hausdorff(central.union_boundary(), g.global_boundary())
    else:
        hd = float("inf")

    compression = sum(report.bytes_sent) / sum(report.raw_partition_bytes)

    cvs = [density_cv(r.points, g.params.g_eps) for r in report.regenerated if len(r.points) >= 2]
    dcv = float(np.mean(cvs)) if cvs else 0.0
    return QualityReport(cov, card_err, hd, compression, dcv)
