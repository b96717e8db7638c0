"""Split a disk down the middle, model each half separately, then merge.

Each half reports a straight edge along the cut. Merging reruns the cone
test on the union of both outlines, and points on the cut find the other
half's outline inside their cone, so most of the seam disappears.

Run: python demos/merge_seam.py [out.svg]
"""
import sys

import numpy as np

from balanceclust.boundary import BoundarySet
from balanceclust.datasets import disk, generate, mean_nn_spacing
from balanceclust.global_merge import derive_global_params, merge
from balanceclust.local_model import LocalParams, build_local_model
from balanceclust.svg import render_svg

pts, _ = generate(disk(seed=2, count=4000))
sp = mean_nn_spacing(pts)
params = LocalParams(eps=4 * sp, min_pts=5, eps_b=8 * sp)
halves = [pts[pts[:, 0] < 0], pts[pts[:, 0] >= 0]]
models = [build_local_model(h, params, node_id=i) for i, h in enumerate(halves)]


def on_cut(points):
    return (np.abs(points[:, 0]) <= 2 * sp) & (np.hypot(points[:, 0], points[:, 1]) < 0.9)


union = BoundarySet.concat([m.union_boundary() for m in models], 2)
print(f"local outlines: {len(union)} points, {on_cut(union.points).mean():.1%} on the cut")

for recompute in (False, True):
    g = merge(models, derive_global_params(models), recompute_balances=recompute)
    gb = g.global_boundary()
    label = "recomputed balances" if recompute else "shipped balances"
    print(f"merged ({label}): {len(gb)} points, {on_cut(gb.points).mean():.1%} on the cut, "
          f"{len(g.clusters)} global cluster(s)")

if len(sys.argv) > 1:
    g = merge(models, derive_global_params(models))
    with open(sys.argv[1], "w") as fh:
        fh.write(render_svg(boundaries=[c.boundary for c in g.clusters], draw_balance=True))
    print("wrote", sys.argv[1])
