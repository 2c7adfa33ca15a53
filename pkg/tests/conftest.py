from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from behaviorclf.features import Dataset


def make_linear_dataset(n: int, seed: int, gap: float = 2.0, d: int = 65,
                        id_prefix: str = "x") -> Dataset:
    """Two gaussian blobs separated along a random direction."""
    rng = np.random.default_rng(seed)
    y = np.where(np.arange(n) % 2 == 0, 1, -1)
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    X = rng.normal(size=(n, d)) + gap * y[:, None] * direction
    ids = tuple(f"{id_prefix}{i:05d}" for i in range(n))
    return Dataset(X=X, y=y.astype(np.int64), sample_ids=ids)


@pytest.fixture
def small_separable():
    return make_linear_dataset(60, seed=5, gap=3.0)
