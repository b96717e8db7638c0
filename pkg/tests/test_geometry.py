import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balanceclust.errors import InvalidInputError
from balanceclust.geometry import HyperRect, dist, dot, make_rng, meh, normalize, sample_uniform

coord = st.floats(-1e3, 1e3, allow_nan=False)
point2 = st.tuples(coord, coord)


@pytest.mark.parametrize("p, q, expected", [
    ((0, 0), (3, 4), 5.0),
    ((1, 2), (1, 2), 0.0),
    ((1, 0, 0), (0, 1, 0), math.sqrt(2)),
])
def test_dist(p, q, expected):
    assert dist(p, q) == pytest.approx(expected, abs=1e-15)


def test_dist_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        dist((0, 0), (0, 0, 0))


@pytest.mark.parametrize("v, expected", [((3, 4), (0.6, 0.8)), ((0, 0), (0, 0)), ((0, -2), (0, -1))])
def test_normalize(v, expected):
    np.testing.assert_allclose(normalize(v), expected, atol=1e-15)


def test_normalize_zero_is_exact():
    assert np.array_equal(normalize(np.zeros(3)), np.zeros(3))


@pytest.mark.parametrize("u, v, expected", [((1, 0), (0, 1), 0), ((1, 2), (3, 4), 11), ((0, 0), (5, 5), 0)])
def test_dot(u, v, expected):
    assert dot(u, v) == expected


def test_dot_mismatch():
    with pytest.raises(InvalidInputError):
        dot((1, 2), (1, 2, 3))


@pytest.mark.parametrize("pts, lo, hi", [
    ([(0, 0), (2, 3)], (0, 0), (2, 3)),
    ([(1, 1)], (1, 1), (1, 1)),
    ([(-1, 2), (3, -4), (0, 0)], (-1, -4), (3, 2)),
])
def test_meh(pts, lo, hi):
    r = meh(pts)
    assert tuple(r.lower) == lo and tuple(r.upper) == hi


def test_meh_empty():
    with pytest.raises(InvalidInputError):
        meh([])


def test_hyperrect_rejects_inverted_corners():
    with pytest.raises(InvalidInputError):
        HyperRect([1, 0], [0, 1])


def test_sample_degenerate_rect():
    r = HyperRect([1, 1], [1, 1])
    assert tuple(sample_uniform(r, make_rng(0))) == (1.0, 1.0)


def test_sample_deterministic():
    r = HyperRect([0, 0], [1, 1])
    assert np.array_equal(sample_uniform(r, make_rng(7)), sample_uniform(r, make_rng(7)))


def test_sample_mean_matches_uniform_law():
    # mean of U[0,1] is 0.5, std of a 1e4-sample mean is ~0.003
    xs = sample_uniform(HyperRect([0, 0], [1, 1]), make_rng(3), size=10_000)
    assert np.all(np.abs(xs.mean(axis=0) - 0.5) < 0.05)


@given(point2, point2, point2)
def test_triangle_inequality(a, b, c):
    assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


@given(st.lists(coord, min_size=1, max_size=5))
def test_normalize_unit(v):
    nonzero = any(x != 0 for x in v)
    out = normalize(v)
    if nonzero:
        assert abs(np.linalg.norm(out) - 1) < 1e-12
    else:
        assert not np.any(out)


@given(st.lists(point2, min_size=1, max_size=30))
def test_meh_contains_inputs(pts):
    r = meh(pts)
    assert r.contains(pts).all()


@settings(max_examples=50)
@given(point2, st.tuples(st.floats(0, 10), st.floats(0, 10)), st.integers(0, 2**32))
def test_sample_inside_rect(lo, width, seed):
    r = HyperRect(lo, np.add(lo, width))
    xs = sample_uniform(r, make_rng(seed), size=20)
    assert r.contains(xs).all()
