import sys
from pathlib import Path

import numpy as np
import pytest

from sc_eval import make_evaluation_set

sys.path.insert(0, str(Path(__file__).parent))

D4_RECORDS = [(0.9, 0), (0.3, 1), (0.7, 1), (0.5, 0)]


@pytest.fixture
def d4():
    return make_evaluation_set(D4_RECORDS)


def random_binary_set(rng, n, p_fail=None, ties=False):
    """Tie-free (unless ``ties``) binary set with at least one sample of each class."""
    p = rng.uniform(0.05, 0.95) if p_fail is None else p_fail
    err = (rng.random(n) < p).astype(float)
    if n >= 2 and (err.all() or not err.any()):
        err[0], err[1] = 0.0, 1.0
    if ties:
        conf = rng.integers(0, max(2, n // 3), size=n).astype(float)
    else:
        conf = rng.permutation(n).astype(float) + rng.random()
    return make_evaluation_set(confidence=conf, error=err)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
