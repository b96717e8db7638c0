import math

import numpy as np
import pytest

from balanceclust.boundary import BoundarySet
from balanceclust.errors import InvalidInputError, RegenerationStalledError
from balanceclust.geometry import meh
from balanceclust.global_merge import GlobalCluster, GlobalModel, GlobalParams
from balanceclust.regenerate import (
    Strategy,
    cluster_rng,
    inside,
    inside_many,
    random_throw,
    regenerate_all,
)

CROSS = BoundarySet(
    [(1, 0), (-1, 0), (0, 1), (0, -1)],
    [(1, 0), (-1, 0), (0, 1), (0, -1)],
    [0] * 4, [0] * 4,
)


def circle(n=400, r=1.0, center=(0.0, 0.0)):
    t = np.linspace(0, 2 * math.pi, n, endpoint=False)
    u = np.column_stack([np.cos(t), np.sin(t)])
    return BoundarySet(np.asarray(center) + r * u, u, np.zeros(n), np.zeros(n))


def test_inside_examples():
    assert inside((0.2, 0), CROSS)
    assert not inside((2, 0), CROSS)


def test_coincident_point_is_outside():
    assert not inside((1, 0), CROSS)


def test_empty_boundary():
    with pytest.raises(InvalidInputError):
        inside((0, 0), BoundarySet.empty(2))


def test_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        inside((0, 0, 0), CROSS)


def test_tie_goes_to_lowest_canonical_index():
    # equidistant from (-1, 0) and (1, 0): canonical order puts (-1, 0) first
    b = BoundarySet([(1, 0), (-1, 0)], [(-1, 0), (-1, 0)], [0, 0], [0, 0])
    # nearest (-1,0): ((-1,0)-(0,0)).(-1,0) = 1 > 0
    assert inside((0, 0), b)


def test_circle_matches_disk_oracle():
    b = circle()
    q = np.random.default_rng(0).uniform(-1.5, 1.5, (1000, 2))
    r = np.hypot(q[:, 0], q[:, 1])
    got = inside_many(q, b.canonical())
    far = np.abs(r - 1) > 0.05
    assert np.array_equal(got[far], r[far] < 1)


def test_m_zero():
    out = random_throw(CROSS, 0, np.random.default_rng(0))
    assert out.points.shape == (0, 2)


def test_negative_m():
    with pytest.raises(InvalidInputError):
        random_throw(CROSS, -1, np.random.default_rng(0))


def test_square_reproducible():
    a = random_throw(CROSS, 10, np.random.default_rng(7))
    b = random_throw(CROSS, 10, np.random.default_rng(7))
    assert a.points.shape == (10, 2)
    assert np.array_equal(a.points, b.points)
    assert inside_many(a.points, CROSS.canonical()).all()
    assert meh(CROSS.points).contains(a.points).all()
    assert a.attempts >= 10


def test_circle_centroid():
    c = (2.0, -1.0)
    out = random_throw(circle(center=c), 1000, np.random.default_rng(3))
    assert len(out.points) == 1000
    assert np.linalg.norm(out.points.mean(axis=0) - c) < 0.1


def test_stall():
    # inward-pointing balances: every sample sits on the wrong side
    b = BoundarySet([(0, 0), (1, 0)], [(1, 0), (-1, 0)], [0, 0], [0, 0])
    with pytest.raises(RegenerationStalledError) as exc:
        random_throw(b, 5, np.random.default_rng(0), max_attempts_factor=10)
    assert exc.value.attempts == 50 and exc.value.accepted == 0


def _model(*boundaries_and_sizes):
    clusters = tuple(GlobalCluster(i, b.canonical(), m, frozenset({(0, i)}))
                     for i, (b, m) in enumerate(boundaries_and_sizes))
    return GlobalModel(GlobalParams(0.5, 0.2), clusters)


def test_regenerate_all_sizes():
    out = regenerate_all(_model((circle(), 500)), seed=1)
    assert len(out) == 1 and out[0].points.shape == (500, 2) and out[0].ok


def test_stream_isolation():
    far = circle(center=(5, 5))
    both = regenerate_all(_model((circle(), 300), (far, 200)), seed=4)
    alone = random_throw(far.canonical(), 200, cluster_rng(4, 1), global_id=1)
    assert np.array_equal(both[1].points, alone.points)
    first = random_throw(circle().canonical(), 300, cluster_rng(4, 0))
    assert np.array_equal(both[0].points, first.points)


def test_stalled_cluster_reported():
    bad = BoundarySet([(0, 0), (1, 0)], [(1, 0), (-1, 0)], [0, 0], [0, 0])
    out = regenerate_all(_model((bad, 3), (circle(), 50)), seed=0, max_attempts_factor=5)
    assert not out[0].ok and out[0].points.shape == (0, 2)
    assert out[1].ok and len(out[1].points) == 50


@pytest.mark.parametrize("s", [Strategy.GRID, "perturbed_grid"])
def test_unimplemented_strategies(s):
    with pytest.raises(NotImplementedError):
        regenerate_all(_model((circle(), 5)), seed=0, strategy=s)
