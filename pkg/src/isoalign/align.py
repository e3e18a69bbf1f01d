"""Cross-lingual alignment by orthogonal maps.

The workhorse is the closed-form orthogonal Procrustes solution: given paired
matrices X, Y it finds the orthogonal W minimising ||XW - Y||_F through one
SVD.  ``OrthogonalAligner`` wraps it as an sklearn-style estimator for raw
matrices; ``procrustes`` / ``self_learn`` operate on embedding spaces plus a
bilingual dictionary.

Self-learning alternates between solving the map on the current dictionary
and re-inducing a dictionary from mutual nearest neighbours of the mapped
spaces, which lets a small seed lexicon bootstrap itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .dictionaries import BilingualDictionary
from .errors import CoverageError
from .preprocess import _l2_rows
from .spaces import EmbeddingSpace
from .validation import check_matrix, check_paired_matrices

DEFAULT_TOP_F = 10_000
DEFAULT_MAX_ROUNDS = 10


def solve_procrustes(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """The orthogonal matrix W minimising ||XW - Y||_F."""
    u, _, vt = np.linalg.svd(X.T @ Y)
    return u @ vt


class OrthogonalAligner(TransformerMixin, BaseEstimator):
    """Least-squares orthogonal mapping between paired vector sets.

    ``fit(X, Y)`` learns the orthogonal ``w_`` minimising ``||XW - Y||_F``;
    ``transform(X)`` applies it. Rotation-only by construction, so vector
    norms and all intra-space distances are preserved.

    Examples
    --------
    >>> X = np.eye(2)
    >>> Y = np.array([[0., 1.], [-1., 0.]])   # 90 degree rotation of X
    >>> OrthogonalAligner().fit(X, Y).w_
    array([[ 0.,  1.],
           [-1.,  0.]])
    """

    def fit(self, X, Y):
        X, Y = check_paired_matrices(X, Y)
        if X.shape[0] < 1:
            raise ValueError("need at least one training pair")
        self.w_ = solve_procrustes(X, Y)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "w_"):
            raise NotFittedError("OrthogonalAligner must be fitted before transform")
        X = check_matrix(X)
        if X.shape[1] != self.w_.shape[0]:
            raise ValueError(
                f"X has {X.shape[1]} features, fitted for {self.w_.shape[0]}"
            )
        return X @ self.w_

    def score(self, X, Y):
        """Negative mean squared residual (larger is better)."""
        X, Y = check_paired_matrices(X, Y)
        return -float(np.mean((self.transform(X) - Y) ** 2))


@dataclass(frozen=True)
class OrthogonalMap:
    """A fitted map together with how it was obtained.

    ``iterations`` counts self-learning induction rounds (0 for a plain
    supervised solve); ``induced_sizes`` records the induced dictionary size
    per round.
    """

    w: np.ndarray
    trained_on: int
    iterations: int = 0
    induced_sizes: tuple = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return self.w.shape[0]


def _paired_matrices(source, target, dictionary):
    usable, report = dictionary.restrict_to(source, target)
    if len(usable) < 1:
        raise CoverageError(
            "no dictionary pairs with both sides in vocabulary "
            f"({report.missing_source} missing source, "
            f"{report.missing_target} missing target)",
            found=0, needed=1,
        )
    X = np.stack([source.vector(s) for s, _ in usable.pairs])
    Y = np.stack([target.vector(t) for _, t in usable.pairs])
    return X, Y, len(usable)


def procrustes(
    source: EmbeddingSpace,
    target: EmbeddingSpace,
    dictionary: BilingualDictionary,
) -> OrthogonalMap:
    """Supervised orthogonal map from dictionary pairs present in both
    vocabularies. Raises :class:`CoverageError` if none survive filtering."""
    if source.dim != target.dim:
        raise ValueError(f"dimension mismatch: {source.dim} vs {target.dim}")
    X, Y, n = _paired_matrices(source, target, dictionary)
    return OrthogonalMap(w=solve_procrustes(X, Y), trained_on=n)


def apply_map(space: EmbeddingSpace, mapping: OrthogonalMap) -> EmbeddingSpace:
    """Rotate a whole space into the target's coordinates."""
    if space.dim != mapping.dim:
        raise ValueError(
            f"space dim {space.dim} does not match map dim {mapping.dim}"
        )
    return space.with_matrix(space.matrix @ mapping.w)


def induce_dictionary(
    mapped_source: EmbeddingSpace,
    target: EmbeddingSpace,
    top_f: int = DEFAULT_TOP_F,
) -> BilingualDictionary:
    """Mutual-nearest-neighbour pairs by cosine over the ``top_f`` most
    frequent words of each side.

    A pair (s, t) is kept iff t is s's nearest target word and s is t's
    nearest source word; cosine ties go to the more frequent candidate, so
    the result is deterministic. On a rotated copy of a space this recovers
    the identity mapping.
    """
    if top_f < 1:
        raise ValueError("top_f must be >= 1")
    src = mapped_source.top(top_f)
    tgt = target.top(top_f)
    if len(src) == 0 or len(tgt) == 0:
        raise ValueError("cannot induce a dictionary from an empty space")
    S = _l2_rows(src.matrix, src.words) @ _l2_rows(tgt.matrix, tgt.words).T
    fwd = np.argmax(S, axis=1)  # first max = lowest rank on ties
    bwd = np.argmax(S, axis=0)
    mutual = np.flatnonzero(bwd[fwd] == np.arange(len(src)))
    pairs = [(src.words[i], tgt.words[fwd[i]]) for i in mutual]
    return BilingualDictionary(pairs, name="induced")


def self_learn(
    source: EmbeddingSpace,
    target: EmbeddingSpace,
    seed: BilingualDictionary,
    top_f: int = DEFAULT_TOP_F,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> OrthogonalMap:
    """Bootstrap an orthogonal map from a seed dictionary.

    Round 0 solves on the seed alone. Each later round maps the source,
    induces a mutual-NN dictionary over the ``top_f`` words, merges it with
    the seed (seed translations win conflicts on either side) and re-solves.
    Stops when the induced pair set repeats or after ``max_rounds`` rounds.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    mapping = procrustes(source, target, seed)
    seed_sources = set(s for s, _ in seed.pairs)
    seed_targets = set(t for _, t in seed.pairs)

    prev: Optional[tuple] = None
    sizes: list[int] = []
    rounds = 0
    w = mapping.w
    trained_on = mapping.trained_on
    for _ in range(max_rounds):
        mapped = apply_map(source, OrthogonalMap(w, trained_on))
        induced = induce_dictionary(mapped, target, top_f)
        rounds += 1
        sizes.append(len(induced))
        if prev is not None and induced.pairs == prev:
            break
        prev = induced.pairs
        merged = list(seed.pairs) + [
            (s, t)
            for s, t in induced.pairs
            if s not in seed_sources and t not in seed_targets
        ]
        X, Y, trained_on = _paired_matrices(
            source, target, BilingualDictionary(merged)
        )
        w = solve_procrustes(X, Y)
    return OrthogonalMap(
        w=w, trained_on=trained_on, iterations=rounds, induced_sizes=tuple(sizes)
    )
