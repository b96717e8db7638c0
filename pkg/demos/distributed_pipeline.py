"""Full simulated run on the three-shape scene: split, model, merge, regenerate, score.

Run: python demos/distributed_pipeline.py [out_dir]
"""
import sys

from balanceclust.datasets import generate, mean_nn_spacing, preset
from balanceclust.harness import PipelineConfig, partition, run_pipeline, write_run
from balanceclust.local_model import LocalParams
from balanceclust.metrics import evaluate_pipeline

pts, labels = generate(preset("ds9-like"))
# radii scale with how sparse one node's share of the data is
sp = mean_nn_spacing(partition(pts, 3, seed=0)[0])
config = PipelineConfig(LocalParams(eps=5 * sp, min_pts=5, eps_b=10 * sp), node_count=3, mode="async")
report = run_pipeline(pts, config)

for m, sent, raw in zip(report.local_models, report.bytes_sent, report.raw_partition_bytes):
    print(f"node {m.node_id}: {len(m.clusters)} clusters, {m.boundary_count} boundary points, "
          f"{sent} bytes sent vs {raw} raw")
print(f"{len(report.provisional_globals)} provisional merges as models arrived in order {report.arrival_order}")
for c, r in zip(report.final_global.clusters, report.regenerated):
    print(f"global {c.global_id}: cardinality {c.cardinality}, from {sorted(c.contributing)}, "
          f"regenerated {len(r.points)} points in {r.attempts} throws")

q = evaluate_pipeline(report, pts, labels)
print(q.to_json(), end="")

if len(sys.argv) > 1:
    for name, path in sorted(write_run(report, sys.argv[1]).items()):
        print("wrote", path)
