"""In-process simulation of the distributed run.

Phase 1 partitions the data; phase 2 runs one local modelling task per node
(threads, processes or serially) and ships each model as its serialized
document; phase 3 merges at the coordinator and regenerates global clusters.
Nodes never share objects with the coordinator: even in-process, every model
is rebuilt from its bytes.
"""
from __future__ import annotations

import enum
import json
import logging
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import csv_bytes, save_csv
from .errors import BalanceClustError, InvalidInputError, InvalidParameterError, NodeError
from .geometry import as_points, make_rng
from .global_merge import GlobalModel, GlobalParams, derive_global_params, merge, serialize_global
from .local_model import LocalModel, LocalParams, build_local_model, deserialize, serialize
from .regenerate import RegeneratedCluster, regenerate_all

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    SYNC = "sync"
    ASYNC = "async"


class Backend(str, enum.Enum):
    SERIAL = "serial"
    THREAD = "thread"
    PROCESS = "process"


@dataclass(frozen=True)
class PipelineConfig:
    local: LocalParams
    node_count: int = 3
    partition_seed: int = 0
    regen_seed: int = 0
    mode: Mode = Mode.SYNC
    node_params: dict = field(default_factory=dict)
    g_nu: float | None = None
    g_eps: float | None = None
    backend: Backend = Backend.THREAD

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "backend", Backend(self.backend))
        if int(self.node_count) != self.node_count or self.node_count < 1:
            raise InvalidParameterError("node_count must be a positive integer")
        bad = [k for k in self.node_params if not 0 <= int(k) < self.node_count]
        if bad:
            raise InvalidParameterError(f"per-node overrides for unknown nodes {bad}")

    def params_for(self, node_id: int) -> LocalParams:
        return self.node_params.get(node_id, self.local)

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "partition_seed": self.partition_seed,
            "regen_seed": self.regen_seed,
            "mode": self.mode.value,
            "backend": self.backend.value,
            "local": self.local.to_dict(),
            "node_params": {str(k): v.to_dict() for k, v in sorted(self.node_params.items())},
            "global": {"g_nu": self.g_nu, "g_eps": self.g_eps},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {"node_count", "partition_seed", "regen_seed", "mode", "backend", "local",
                 "node_params", "global", "dataset"}
        unknown = set(d) - known
        if unknown:
            raise InvalidParameterError(f"unknown configuration keys {sorted(unknown)}")
        g = d.get("global") or {}
        return cls(
            local=LocalParams.from_dict(d["local"]),
            node_count=int(d.get("node_count", 3)),
            partition_seed=int(d.get("partition_seed", 0)),
            regen_seed=int(d.get("regen_seed", 0)),
            mode=d.get("mode", "sync"),
            backend=d.get("backend", "thread"),
            node_params={int(k): LocalParams.from_dict(v) for k, v in (d.get("node_params") or {}).items()},
            g_nu=g.get("g_nu"),
            g_eps=g.get("g_eps"),
        )


def load_config(path) -> tuple[PipelineConfig, dict]:
    """Read a JSON pipeline configuration; returns the config and the raw document."""
    doc = json.loads(Path(path).read_text())
    return PipelineConfig.from_dict(doc), doc


@dataclass
class PipelineReport:
    config: PipelineConfig
    partition_sizes: list[int]
    local_models: list[LocalModel]
    model_documents: list[bytes]
    raw_partition_bytes: list[int]
    final_global: GlobalModel
    regenerated: list[RegeneratedCluster]
    provisional_globals: list[GlobalModel] = field(default_factory=list)
    arrival_order: list[int] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def bytes_sent(self) -> list[int]:
        return [len(d) for d in self.model_documents]

    def manifest(self, include_timings: bool = False) -> dict:
        """Run summary; without timings it is a pure function of inputs and seeds."""
        g = self.final_global
        doc = {
            "config": self.config.to_dict(),
            "partition_sizes": self.partition_sizes,
            "nodes": [
                {
                    "node_id": m.node_id,
                    "clusters": len(m.clusters),
                    "boundary_points": m.boundary_count,
                    "cardinality": m.total_cardinality,
                    "bytes_sent": len(doc_),
                    "raw_partition_bytes": raw,
                }
                for m, doc_, raw in zip(self.local_models, self.model_documents, self.raw_partition_bytes)
            ],
            "global": {
                "params": g.params.to_dict(),
                "clusters": [
                    {"global_id": c.global_id, "cardinality": c.cardinality, "boundary_points": len(c.boundary),
                     "contributing": [list(k) for k in sorted(c.contributing)]}
                    for c in g.clusters
                ],
                "bytes": len(serialize_global(g)),
            },
            "regenerated": [
                {"global_id": r.global_id, "points": len(r.points), "target": r.target_cardinality,
                 "attempts": r.attempts, "error": r.error}
                for r in self.regenerated
            ],
            "provisional_merges": len(self.provisional_globals),
        }
        if include_timings:
            doc["timings"] = self.timings
            doc["arrival_order"] = self.arrival_order
        return doc

    def manifest_bytes(self) -> bytes:
        return (json.dumps(self.manifest(), sort_keys=True, indent=2) + "\n").encode()


def partition_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    if int(k) != k or k < 1:
        raise InvalidInputError("k must be a positive integer")
    if k > n:
        raise InvalidInputError(f"cannot split {n} points into {k} non-empty partitions")
    perm = make_rng(seed).permutation(n)
    return [np.sort(p) for p in np.array_split(perm, k)]


def partition(points, k: int, seed: int) -> list[np.ndarray]:
    """Random horizontal split into ``k`` parts whose sizes differ by at most one."""
    pts = as_points(points)
    return [pts[idx] for idx in partition_indices(len(pts), k, seed)]


def node_task(node_id: int, points: np.ndarray, params: dict) -> bytes:
    """Work done on one node; only bytes leave it."""
    model = build_local_model(points, LocalParams.from_dict(params), node_id)
    return serialize(model)


def _arrivals(config: PipelineConfig, parts, params):
    """Yield ``(node_id, document)`` in completion order."""
    if config.backend is Backend.SERIAL:
        for i in range(config.node_count):
            try:
                yield i, node_task(i, parts[i], params[i])
            except Exception as exc:  # noqa: BLE001 - attribute every failure to its node
                raise NodeError(i, exc) from exc
        return
    pool_cls = ThreadPoolExecutor if config.backend is Backend.THREAD else ProcessPoolExecutor
    with pool_cls(max_workers=config.node_count) as pool:
        futures = {pool.submit(node_task, i, parts[i], params[i]): i for i in range(config.node_count)}
        waiting = set(futures)
        while waiting:
            done, waiting = wait(waiting, return_when=FIRST_COMPLETED)
            for fut in sorted(done, key=futures.get):
                node = futures[fut]
                try:
                    data = fut.result()
                except Exception as exc:  # noqa: BLE001
                    for other in waiting:
                        other.cancel()
                    raise NodeError(node, exc) from exc
                yield node, data


def _global_params(models, config):
    return derive_global_params(models, g_nu=config.g_nu, g_eps=config.g_eps)


def run_pipeline(points, config: PipelineConfig) -> PipelineReport:
    """Partition, model every node, merge and regenerate.

    In ASYNC mode a provisional global model is produced after each arrival;
    the final merge over all models is the same call as in SYNC mode, so both
    modes end in the same answer.
    """
    pts = as_points(points)
    timings = {}
    t0 = time.perf_counter()
    parts = partition(pts, config.node_count, config.partition_seed)
    timings["partition"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    docs: dict[int, bytes] = {}
    models: dict[int, LocalModel] = {}
    provisional, arrival = [], []
    params = {i: config.params_for(i).to_dict() for i in range(config.node_count)}
    for node, data in _arrivals(config, parts, params):
        try:
            models[node] = deserialize(data)
        except BalanceClustError as exc:
            raise NodeError(node, exc) from exc
        docs[node] = data
        arrival.append(node)
        if config.mode is Mode.ASYNC:
            received = [models[k] for k in sorted(models)]
            provisional.append(merge(received, _global_params(received, config)))
    timings["local"] = time.perf_counter() - t0

    ordered = [models[i] for i in range(config.node_count)]
    t0 = time.perf_counter()
    final = merge(ordered, _global_params(ordered, config))
    timings["merge"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    regenerated = regenerate_all(final, config.regen_seed)
    timings["regenerate"] = time.perf_counter() - t0
    for r in regenerated:
        if r.error:
            log.warning("global cluster %d: %s", r.global_id, r.error)

    return PipelineReport(
        config=config,
        partition_sizes=[len(p) for p in parts],
        local_models=ordered,
        model_documents=[docs[i] for i in range(config.node_count)],
        raw_partition_bytes=[csv_bytes(p) for p in parts],
        final_global=final,
        regenerated=regenerated,
        provisional_globals=provisional,
        arrival_order=arrival,
        timings=timings,
    )


def write_run(report: PipelineReport, out_dir) -> dict[str, Path]:
    """Write manifest, per-node model documents, the global model and regenerated CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"manifest": out / "manifest.json", "global": out / "global.model",
             "regenerated": out / "regenerated.csv"}
    files["manifest"].write_bytes(report.manifest_bytes())
    for m, doc in zip(report.local_models, report.model_documents):
        path = out / f"node{m.node_id}.model"
        path.write_bytes(doc)
        files[f"node{m.node_id}"] = path
    files["global"].write_bytes(serialize_global(report.final_global))
    write_regenerated_csv(report.regenerated, files["regenerated"])
    return files


def write_regenerated_csv(regenerated, path) -> None:
    """Regenerated points with their global cluster id as the label column."""
    dims = [r.points.shape[1] for r in regenerated if len(r.points)]
    dim = dims[0] if dims else 0
    pts = np.concatenate([r.points for r in regenerated]) if regenerated else np.zeros((0, dim))
    labels = np.concatenate([np.full(len(r.points), r.global_id) for r in regenerated]) if regenerated else []
    save_csv(pts.reshape(-1, dim) if dim else pts, path, labels=labels)
