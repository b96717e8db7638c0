"""Find the outline of a filled disk with the cone test and look at where it lands.

Run: python demos/boundary_detection.py [out.svg]
"""
import math
import sys

import numpy as np

from balanceclust.boundary import BoundaryParams, detect_boundary
from balanceclust.datasets import disk, generate
from balanceclust.svg import render_svg

pts, _ = generate(disk())
boundary = detect_boundary(pts, BoundaryParams(eps_b=0.15, nu=math.pi / 6))
print(f"{len(pts)} points, {len(boundary)} flagged as boundary")

# Where do the flagged points sit? Bucket them by distance from the centre.
r = np.hypot(*boundary.points.T)
for lo in (0.0, 0.6, 0.8, 0.9, 0.95):
    print(f"  radius >= {lo:.2f}: {np.mean(r >= lo):.1%}")

# Balance vectors should point away from the centre on the rim.
radial = np.einsum("ij,ij->i", boundary.points / r[:, None], boundary.balances)
print(f"mean cosine between balance vector and outward normal: {radial.mean():.3f}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(render_svg(pts, boundaries=[boundary], draw_balance=True, title="disk outline"))
    print("wrote", sys.argv[1])
