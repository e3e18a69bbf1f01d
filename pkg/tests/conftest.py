import numpy as np
import pytest

from isoalign.dictionaries import BilingualDictionary
from isoalign.spaces import EmbeddingSpace


def make_space(n, dim, seed=0, prefix="w", counts=True):
    rng = np.random.default_rng(seed)
    words = tuple(f"{prefix}{i}" for i in range(n))
    cts = tuple(range(2 * n, n, -1)) if counts else None
    return EmbeddingSpace(words, rng.normal(size=(n, dim)), cts)


def identity_dict(space):
    return BilingualDictionary(tuple((w, w) for w in space.words))


@pytest.fixture
def small_space():
    return make_space(40, 8, seed=1)


@pytest.fixture
def paired_spaces():
    """A space and an exact rotated copy with renamed words."""
    src = make_space(60, 10, seed=2, prefix="a")
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(10, 10)))
    tgt = EmbeddingSpace(
        tuple(f"b{i}" for i in range(60)), src.matrix @ q, src.counts
    )
    return src, tgt, q
