"""Vector-space preprocessing: length normalisation, mean centering, chains.

Chains are spelled compactly (``"unnorm"``, ``"l2"``, ``"l2+mc+l2"``,
``"iternorm"``) because experiment grids sweep over them.  Iterative
normalisation repeats the l2+mc+l2 block until the column means vanish.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ZeroVectorError
from .spaces import EmbeddingSpace
from .validation import check_matrix, check_space

Step = Union[str, tuple]
Chain = tuple  # tuple of Step

DEFAULT_ITER_TOL = 1e-5
DEFAULT_ITER_MAX = 5


def _l2_rows(X: np.ndarray, words=None) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        i = int(bad[0])
        raise ZeroVectorError(words[i] if words is not None else f"row {i}")
    return X / norms[:, None]


def _center_rows(X: np.ndarray) -> np.ndarray:
    return X - X.mean(axis=0)


def l2_normalize(space: EmbeddingSpace) -> EmbeddingSpace:
    """Scale every row to unit Euclidean length.

    Raises :class:`ZeroVectorError` naming the word whose vector is zero.
    Idempotent: applying it twice gives the same matrix to ~1e-12.
    """
    check_space(space)
    return space.with_matrix(_l2_rows(space.matrix, space.words))


def mean_center(space: EmbeddingSpace) -> EmbeddingSpace:
    """Subtract the column mean from every row."""
    check_space(space)
    return space.with_matrix(_center_rows(space.matrix))


class IterNormResult(NamedTuple):
    space: EmbeddingSpace
    converged: bool
    iterations: int
    residual: float


def iterative_normalize(
    space: EmbeddingSpace,
    tol: float = DEFAULT_ITER_TOL,
    max_iters: int = DEFAULT_ITER_MAX,
) -> IterNormResult:
    """Repeat l2 + mean-center + l2 until the column mean (of the now
    unit-length rows) has norm below ``tol``.

    Non-convergence within ``max_iters`` is reported via the ``converged``
    flag, not raised: the partially normalised space is still usable.  The
    returned matrix always has unit rows (the block ends with l2).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    X = space.matrix
    converged = False
    residual = float("inf")
    iterations = 0
    for iterations in range(1, max_iters + 1):
        X = _l2_rows(X, space.words)
        X = _center_rows(X)
        X = _l2_rows(X, space.words)
        residual = float(np.linalg.norm(X.mean(axis=0)))
        if residual < tol:
            converged = True
            break
    return IterNormResult(space.with_matrix(X), converged, iterations, residual)


_NAMED_CHAINS = {
    "unnorm": (),
    "l2": ("l2",),
    "mc": ("mc",),
    "l2+mc+l2": ("l2", "mc", "l2"),
    "iternorm": (("iternorm", DEFAULT_ITER_MAX, DEFAULT_ITER_TOL),),
}


def parse_chain(name: str) -> Chain:
    """Turn a spelled chain like ``"l2+mc+l2"`` into a step tuple.

    Any ``+``-joined combination of ``l2``, ``mc`` and ``iternorm`` is
    accepted; ``unnorm`` stands alone and means "no preprocessing".
    """
    name = name.strip().lower()
    if name in _NAMED_CHAINS:
        return _NAMED_CHAINS[name]
    steps: list[Step] = []
    for part in name.split("+"):
        part = part.strip()
        if part in ("l2", "mc"):
            steps.append(part)
        elif part == "iternorm":
            steps.append(("iternorm", DEFAULT_ITER_MAX, DEFAULT_ITER_TOL))
        else:
            raise ValueError(
                f"unknown preprocessing step {part!r} "
                "(expected l2, mc, iternorm, or unnorm)"
            )
    return tuple(steps)


def chain_label(chain: Union[str, Sequence[Step]]) -> str:
    """Canonical spelling of a chain, for CSV output."""
    if isinstance(chain, str):
        chain = parse_chain(chain)
    if not chain:
        return "unnorm"
    parts = []
    for step in chain:
        parts.append("iternorm" if isinstance(step, tuple) else step)
    return "+".join(parts)


def apply_chain(space: EmbeddingSpace, chain: Union[str, Sequence[Step]]) -> EmbeddingSpace:
    """Apply preprocessing steps in order and return the resulting space."""
    if isinstance(chain, str):
        chain = parse_chain(chain)
    for step in chain:
        if step == "l2":
            space = l2_normalize(space)
        elif step == "mc":
            space = mean_center(space)
        elif isinstance(step, tuple) and step and step[0] == "iternorm":
            _, max_iters, tol = step
            space = iterative_normalize(space, tol=tol, max_iters=max_iters).space
        else:
            raise ValueError(f"unknown preprocessing step {step!r}")
    return space


class VectorNormalizer(TransformerMixin, BaseEstimator):
    """Stateless transformer applying a preprocessing chain to raw matrices.

    Useful for dropping the same preprocessing into an sklearn pipeline that
    handles generic arrays rather than :class:`EmbeddingSpace` objects.

    Parameters
    ----------
    steps : str, default="l2"
        Chain spelling as accepted by :func:`parse_chain`.
    """

    def __init__(self, steps: str = "l2"):
        self.steps = steps

    def fit(self, X, y=None):
        parse_chain(self.steps)  # validate early
        self.n_features_in_ = check_matrix(X).shape[1]
        return self

    def transform(self, X):
        X = check_matrix(X)
        chain = parse_chain(self.steps)
        for step in chain:
            if step == "l2":
                X = _l2_rows(X)
            elif step == "mc":
                X = _center_rows(X)
            else:
                _, max_iters, tol = step
                for _ in range(max_iters):
                    X = _l2_rows(_center_rows(_l2_rows(X)))
                    if np.linalg.norm(X.mean(axis=0)) < tol:
                        break
        return X
