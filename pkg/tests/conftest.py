import numpy as np
import pytest

_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call ``criterion(name, passed, detail)``."""

    def record(name, passed, detail=""):
        _RESULTS.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ds9_config(**overrides):
    """Frozen ds9-like setup: radii scaled to the mean spacing of partition 0."""
    from balanceclust.datasets import generate, mean_nn_spacing, preset
    from balanceclust.harness import PipelineConfig, partition
    from balanceclust.local_model import LocalParams

    pts, labels = generate(preset("ds9-like"))
    sp = mean_nn_spacing(partition(pts, 3, 0)[0])
    cfg = dict(local=LocalParams(5 * sp, 5, eps_b=10 * sp), node_count=3, partition_seed=0)
    cfg.update(overrides)
    return pts, labels, PipelineConfig(**cfg)


@pytest.fixture(scope="session")
def ds9_run():
    from balanceclust.harness import run_pipeline

    pts, labels, config = ds9_config()
    return pts, labels, run_pipeline(pts, config)
