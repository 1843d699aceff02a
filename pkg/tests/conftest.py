import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import hgresample as hg
from hgresample.kernels import active_backend

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# Both kernel implementations when the extension is importable.
IMPLS = ("python",) if active_backend() == "python" else ("python", "compiled")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def make_cloud():
    def make(n=200, seed=0, scale=1.0, labels=False):
        gen = np.random.default_rng(seed)
        pts = gen.uniform(-scale, scale, (n, 3))
        lab = gen.integers(0, 2, n).astype(np.uint8) if labels else None
        if lab is not None and lab.sum() == 0:
            lab[0] = 1
        return hg.PointCloud(pts, lab)

    return make


@pytest.fixture(scope="session")
def cube_cloud():
    return hg.generate_cube_union(hg.default_two_cube_spec())


@pytest.fixture(scope="session")
def small_cube_cloud():
    # coarser spacing keeps per-test scoring cheap
    return hg.generate_cube_union(hg.default_two_cube_spec(spacing=0.05))
