import numpy as np
import pytest

from vropt.data import Dataset, SyntheticSpec, generate_synthetic
from vropt.model import LogisticModel, NonconvexLogisticModel, SparseRow


def make_homogeneous_dataset(n=16, d=24, nnz=4, value=1.5):
    """Rows with identical value multiset (hence bit-identical ||a_i||^2 and
    L_i) at shifted column positions.  Used by the exact-reduction tests."""
    rows = []
    for i in range(n):
        idx = np.sort((i + 3 * np.arange(nnz)) % d).astype(np.int64)
        rows.append(SparseRow(indices=idx,
                              values=np.full(nnz, value),
                              label=1.0 if i % 2 == 0 else -1.0))
    return Dataset(rows=tuple(rows), d=d, name="homogeneous")


@pytest.fixture(scope="session")
def tiny_dataset():
    return generate_synthetic(
        SyntheticSpec(n=20, d=5, spread=2.0, noise_rate=0.1, seed=11))


@pytest.fixture(scope="session")
def convex_model(tiny_dataset):
    return LogisticModel(tiny_dataset, lam=0.0)


@pytest.fixture(scope="session")
def sc_model(tiny_dataset):
    return LogisticModel(tiny_dataset, lam=0.1)


@pytest.fixture(scope="session")
def nonconvex_model(tiny_dataset):
    return NonconvexLogisticModel(tiny_dataset, alpha=1.0)


@pytest.fixture(scope="session")
def homogeneous_dataset():
    return make_homogeneous_dataset()
