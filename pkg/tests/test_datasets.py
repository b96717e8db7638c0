import numpy as np
import pytest

from balanceclust.datasets import (
    BITE_OFFSET,
    Kind,
    ShapeSpec,
    crescent,
    csv_bytes,
    disk,
    generate,
    load_csv,
    mean_nn_spacing,
    preset,
    save_csv,
)
from balanceclust.errors import CsvParseError, InvalidParameterError
from balanceclust.geometry import meh


def test_blob():
    pts, labels = generate([ShapeSpec(Kind.BLOB, (1, 2), 0.5, count=100)])
    assert pts.shape == (100, 2) and (labels == 0).all()


def test_disk_within_radius():
    pts, _ = generate(disk())
    assert len(pts) == 2000
    assert np.hypot(pts[:, 0], pts[:, 1]).max() <= 1.0


def test_crescent_has_concavity():
    (spec,) = crescent()
    pts, _ = generate([spec])
    assert spec.contains(pts).all()
    # the bite centre lies inside the bounding box but outside the shape
    probe = np.array([[BITE_OFFSET, 0.0]])
    assert meh(pts).contains(probe).all()
    assert not spec.contains(probe).any()
    assert spec.concave_rim_distance(pts).min() < 0.05


@pytest.mark.parametrize("kind", list(Kind))
def test_shapes_respect_oracle(kind):
    spec = ShapeSpec(kind, (3, -1), 2.0, 0.7, 500, seed=1)
    pts = spec.sample()
    assert pts.shape == (500, 2)
    assert spec.contains(pts).all()


def test_deterministic():
    a, _ = generate(preset("ds9-like"))
    b, _ = generate(preset("ds9-like"))
    assert np.array_equal(a, b)
    c, _ = generate(preset("ds9-like", seed=3))
    assert not np.array_equal(a, c)


def test_preset_labels():
    pts, labels = generate(preset("ds1-like"))
    assert sorted(np.unique(labels).tolist()) == [0, 1, 2, 3]
    assert len(pts) == len(labels)


def test_invalid():
    with pytest.raises(InvalidParameterError):
        preset("nope")
    with pytest.raises(InvalidParameterError):
        ShapeSpec(Kind.DISK, count=0)
    with pytest.raises(InvalidParameterError):
        ShapeSpec(Kind.CRESCENT, (0, 0, 0))


def test_noise_moves_points():
    spec = ShapeSpec(Kind.DISK, count=200, seed=2)
    noisy = ShapeSpec(Kind.DISK, count=200, seed=2, noise_stddev=0.1)
    assert not np.array_equal(spec.sample(), noisy.sample())


def test_csv_round_trip(tmp_path, rng):
    pts = rng.normal(size=(50, 3))
    path = tmp_path / "p.csv"
    save_csv(pts, path)
    assert np.array_equal(load_csv(path), pts)
    assert csv_bytes(pts) == path.stat().st_size


def test_csv_header_and_labels(tmp_path, rng):
    pts, labels = rng.random((10, 2)), np.arange(10) % 3
    path = tmp_path / "p.csv"
    save_csv(pts, path, labels=labels, header=True)
    assert path.read_text().splitlines()[0] == "x0,x1,label"
    got, got_labels = load_csv(path, header=True, labels=True)
    assert np.array_equal(got, pts) and np.array_equal(got_labels, labels)


def test_csv_empty(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("")
    assert load_csv(path).shape[0] == 0


@pytest.mark.parametrize("text, line", [("1,2\n3\n", 2), ("1,2\nx,4\n", 2), ("nan,1\n", 1)])
def test_csv_errors(tmp_path, text, line):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(CsvParseError) as exc:
        load_csv(path)
    assert exc.value.line == line


def test_mean_spacing():
    assert mean_nn_spacing([(0, 0), (1, 0), (3, 0)]) == pytest.approx((1 + 1 + 2) / 3)
