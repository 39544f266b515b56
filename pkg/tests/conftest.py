import numpy as np
import pytest

from findrs import benchmarks as B
from findrs import dataset as D


@pytest.fixture(scope="session")
def monk_tables():
    return {name: B.generate_monk(name) for name in ("monk-1", "monk-2", "monk-3")}


@pytest.fixture(scope="session")
def ttt_table():
    return B.generate_tictactoe()


@pytest.fixture(scope="session")
def ttt_av(ttt_table):
    return D.dataset_from_table(ttt_table, B.make_manifest("tic-tac-toe"), encoding="av")


@pytest.fixture(scope="session")
def monk_av(monk_tables):
    return {
        name: D.dataset_from_table(table, B.make_manifest(name), encoding="av")
        for name, table in monk_tables.items()
    }


@pytest.fixture(scope="session")
def monk_oh(monk_tables):
    return {
        name: D.dataset_from_table(table, B.make_manifest(name), encoding="oh")
        for name, table in monk_tables.items()
    }


def random_dataset(rng, max_m=8, max_k=4, max_n=200):
    """Random contradiction-free categorical dataset as (X, y) code arrays.

    Labels are assigned per distinct instance, so identical rows always agree.
    """
    m = rng.integers(2, max_m + 1)
    sizes = rng.integers(2, max_k + 1, size=m)
    n = int(rng.integers(4, max_n + 1))
    X = np.stack([rng.integers(0, sizes[j], size=n) for j in range(m)], axis=1)
    X = X.astype(np.int32)
    uniq, inverse = np.unique(X, axis=0, return_inverse=True)
    labels_per_uniq = rng.choice([-1, 1], size=len(uniq))
    if (labels_per_uniq == 1).sum() == 0:
        labels_per_uniq[rng.integers(0, len(uniq))] = 1
    y = labels_per_uniq[inverse].astype(np.int8)
    return X, y
