import itertools
import math

import numpy as np
import pytest

from balanceclust.boundary import BoundarySet
from balanceclust.datasets import disk, generate, mean_nn_spacing
from balanceclust.errors import InvalidInputError, InvalidParameterError, ModelParseError
from balanceclust.global_merge import (
    GlobalParams,
    derive_global_params,
    deserialize_global,
    merge,
    serialize_global,
)
from balanceclust.local_model import LocalParams, build_local_model

import oracles


def points_of(b):
    return set(map(tuple, b.points))


@pytest.fixture(scope="module")
def seam():
    pts, _ = generate(disk(seed=2, count=4000))
    left, right = pts[pts[:, 0] < 0], pts[pts[:, 0] >= 0]
    sp = mean_nn_spacing(pts)
    params = LocalParams(4 * sp, 5, eps_b=8 * sp)
    models = [build_local_model(left, params, 0), build_local_model(right, params, 1)]
    return pts, sp, models


def cut_fraction(b, sp):
    p = b.points
    r = np.hypot(p[:, 0], p[:, 1])
    return float(np.mean((np.abs(p[:, 0]) <= 2 * sp) & (r < 0.9))) if len(p) else 0.0


def test_derive_max_rule(rng):
    pts = rng.normal(size=(100, 2))
    a = build_local_model(pts, LocalParams(0.5, 3, nu=math.pi / 6), 0)
    b = build_local_model(pts, LocalParams(0.5, 3, eps_b=0.8, nu=math.pi / 8), 1)
    g = derive_global_params([a, b])
    assert g.g_nu == pytest.approx(math.pi / 6) and g.g_eps == 0.8
    single = derive_global_params([b])
    assert single.g_nu == b.params.nu and single.g_eps == b.params.eps_b
    over = derive_global_params([a, b], g_nu=0.3, g_eps=2.0)
    assert (over.g_nu, over.g_eps) == (0.3, 2.0)


def test_derive_empty():
    with pytest.raises(InvalidInputError):
        derive_global_params([])


@pytest.mark.parametrize("nu, eps", [(0, 1), (math.pi / 2, 1), (0.5, 0)])
def test_global_params_invalid(nu, eps):
    with pytest.raises(InvalidParameterError):
        GlobalParams(nu, eps)


def test_single_model_conservation(rng):
    pts = np.vstack([rng.normal(0, 0.3, (300, 2)), rng.normal(4, 0.3, (300, 2))])
    m = build_local_model(pts, LocalParams(0.3, 4), 0)
    g = merge([m], derive_global_params([m]))
    assert g.total_cardinality == m.total_cardinality
    assert len(g.clusters) == len(m.clusters)
    for c in g.clusters:
        assert len(c.contributing) == 1
    assert points_of(g.global_boundary()) <= points_of(m.union_boundary())


def test_far_apart_models_keep_local_decisions(rng):
    a_pts = rng.normal(0, 0.3, (400, 2))
    b_pts = rng.normal((10, 0), 0.3, (400, 2))
    params = LocalParams(0.3, 4, eps_b=0.25)
    a, b = build_local_model(a_pts, params, 0), build_local_model(b_pts, params, 1)
    g = merge([a, b], derive_global_params([a, b]))
    union = BoundarySet.concat([a.union_boundary(), b.union_boundary()], 2)
    # oracle: the plain detector rerun on the union with the shipped balances
    mask = oracles.cone_boundary(union.points, 0.25, math.pi / 6, balances=union.balances)
    assert points_of(g.global_boundary()) == set(map(tuple, union.points[mask]))
    # and that is all of B: restricting the neighbourhood never revives a neighbour inside a cone
    assert points_of(g.global_boundary()) == points_of(union)
    assert sorted(len(c.contributing) for c in g.clusters) == [1] * (len(a.clusters) + len(b.clusters))


def test_seam_removed(seam):
    _, sp, models = seam
    union = BoundarySet.concat([m.union_boundary() for m in models], 2)
    g = merge(models, derive_global_params(models))
    assert len(g.clusters) == 1
    assert cut_fraction(g.global_boundary(), sp) < cut_fraction(union, sp)
    assert g.clusters[0].contributing == {(0, 0), (1, 0)}


def test_recomputed_balances_variant(seam):
    _, sp, models = seam
    union = BoundarySet.concat([m.union_boundary() for m in models], 2)
    g = merge(models, derive_global_params(models), recompute_balances=True)
    assert points_of(g.global_boundary()) <= points_of(union)
    assert g.total_cardinality == sum(m.total_cardinality for m in models)
    norms = np.linalg.norm(g.global_boundary().balances, axis=1)
    assert np.all((np.abs(norms - 1) < 1e-9) | (norms == 0))


def test_permutation_invariance(seam, rng):
    _, _, models = seam
    extra = build_local_model(rng.normal((5, 5), 0.2, (200, 2)), models[0].params, 2)
    all_models = models + [extra]
    ref = serialize_global(merge(all_models, derive_global_params(all_models)))
    for perm in itertools.permutations(all_models):
        assert serialize_global(merge(list(perm), derive_global_params(list(perm)))) == ref


def test_invariants(seam):
    _, _, models = seam
    g = merge(models, derive_global_params(models))
    seen = set()
    for c in g.clusters:
        pts = points_of(c.boundary)
        assert not (pts & seen)
        seen |= pts
    keys = [k for c in g.clusters for k in c.contributing]
    assert sorted(keys) == sorted((m.node_id, c.cluster_id) for m in models for c in m.clusters)


def test_empty_and_mismatched():
    p = GlobalParams(0.5, 1.0)
    assert merge([], p).clusters == ()
    a = build_local_model([(0, 0), (0.1, 0)], LocalParams(1, 2), 0)
    b = build_local_model([(0, 0, 0), (0.1, 0, 0)], LocalParams(1, 2), 1)
    with pytest.raises(InvalidInputError):
        merge([a, b], p)
    with pytest.raises(InvalidInputError):
        merge([a, a], p)


def test_global_round_trip(seam):
    _, _, models = seam
    g = merge(models, derive_global_params(models))
    data = serialize_global(g)
    back = deserialize_global(data)
    assert back == g
    assert back.cluster_of(1, 0) == 0
    with pytest.raises(ModelParseError):
        deserialize_global(data[:-5])


def _fragment_and_host(kind):
    from balanceclust.datasets import Kind, ShapeSpec

    host, _ = generate([ShapeSpec(kind, (0, 0), 1.0, 0, 3000, seed=1)])
    frag = np.random.default_rng(0).normal(0, 0.02, (12, 2))
    params = LocalParams(0.1, 4, eps_b=0.2)
    return [build_local_model(host, params, 0), build_local_model(frag, params, 1)]


def test_interior_fragment_absorbed():
    from balanceclust.datasets import Kind

    models = _fragment_and_host(Kind.DISK)
    g = merge(models, derive_global_params(models))
    assert len(g.clusters) == 1
    assert g.clusters[0].contributing == {(0, 0), (1, 0)}


def test_cluster_in_hole_kept_apart():
    from balanceclust.datasets import Kind

    models = _fragment_and_host(Kind.ANNULUS)
    g = merge(models, derive_global_params(models))
    assert len(g.clusters) == 2


def test_flat_survivors_fall_back_to_local_boundary():
    from balanceclust.local_model import ClusterRepresentative, LocalCluster, LocalModel
    from balanceclust.regenerate import regenerate_all

    # (0, 0) sees (0.2, 0) inside its cone and is dropped, leaving a single survivor
    pts = np.array([(0.0, 0.0), (0.2, 0.0)])
    bal = np.array([(1.0, 0.0), (1.0, 0.0)])
    local = BoundarySet(pts, bal, np.zeros(2), np.zeros(2))
    m = LocalModel(0, LocalParams(0.5, 2), (LocalCluster(0, ClusterRepresentative(10, 2.0), local),))
    g = merge([m], GlobalParams(math.pi / 6, 0.5))
    assert len(g.clusters) == 1 and len(g.clusters[0].boundary) == 2
    out = regenerate_all(g, seed=0)
    assert out[0].ok and len(out[0].points) == 10
