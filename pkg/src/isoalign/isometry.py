"""Isomorphism measures between word vector spaces.

Three families of measures quantify how close two spaces are to being
isometric, without requiring them to share a vocabulary:

* ``evs`` - eigenvector similarity: compare Laplacian spectra of nearest
  neighbour graphs built over the most frequent words. Lower = more
  isomorphic.
* ``gh`` - an estimate of the Gromov-Hausdorff distance via the bottleneck
  distance between 0-dimensional Vietoris-Rips persistence diagrams. Lower =
  more isomorphic.
* ``rsim`` - relational similarity: Pearson correlation between the sorted
  lists of intra-lingual cosine similarities over translation pairs.
  Higher = more isomorphic.

``hausdorff`` and ``pearson`` are exposed as building blocks in their own
right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from .dictionaries import BilingualDictionary
from .errors import CoverageError, UndefinedCorrelationError
from .preprocess import l2_normalize, mean_center
from .spaces import EmbeddingSpace
from .validation import check_matrix

DEFAULT_N_TOP = 1000
DEFAULT_KNN = 10
ENERGY_FRACTION = 0.9


# ---------------------------------------------------------------------------
# correlation


def pearson(x, y) -> float:
    """Sample Pearson correlation.

    Raises :class:`UndefinedCorrelationError` when either sequence has zero
    variance (the usual nan-producing case).
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.size < 2:
        raise ValueError("need at least two observations")
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelationError("zero variance input")
    return float((xc @ yc) / np.sqrt(vx * vy))


# ---------------------------------------------------------------------------
# eigenvector similarity


@dataclass(frozen=True)
class NNGraph:
    """Undirected k-nearest-neighbour graph (symmetrised by edge union)."""

    n: int
    k: int
    adjacency: np.ndarray  # (n, n) bool, symmetric, zero diagonal

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


class SpectralStats(NamedTuple):
    """Laplacian eigenvalues (descending) and the 90%-energy cutoff index."""

    eigenvalues: np.ndarray
    k: int


class EVSResult(NamedTuple):
    delta: float
    k: int
    source: SpectralStats
    target: SpectralStats


def knn_graph(space: Union[EmbeddingSpace, np.ndarray], k: int) -> NNGraph:
    """Each word gets edges to its ``k`` nearest neighbours by cosine
    similarity; the relation is then symmetrised by union.

    Ties are broken towards the more frequent word (lower row index), so the
    graph is deterministic. Requires ``1 <= k < n``.
    """
    X = space.matrix if isinstance(space, EmbeddingSpace) else check_matrix(space)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n={n}, got {k}")
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero vector has no cosine neighbours")
    Xn = X / norms[:, None]
    sims = Xn @ Xn.T
    np.fill_diagonal(sims, -np.inf)
    # stable sort on descending similarity = ties resolved by lower rank
    order = np.argsort(-sims, axis=1, kind="stable")[:, :k]
    adj = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), k)
    adj[rows, order.ravel()] = True
    adj |= adj.T
    return NNGraph(n=n, k=k, adjacency=adj)


def laplacian_spectrum(graph: NNGraph) -> np.ndarray:
    """Eigenvalues of the unnormalised Laplacian L = D - A, descending."""
    A = graph.adjacency.astype(np.float64)
    L = np.diag(A.sum(axis=1)) - A
    eigs = np.linalg.eigvalsh(L)
    return eigs[::-1].copy()


def energy_cutoff(eigenvalues: np.ndarray, fraction: float = ENERGY_FRACTION) -> int:
    """Smallest k such that the k largest eigenvalues hold ``fraction`` of
    the total spectral mass."""
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    total = eigenvalues.sum()
    if total <= 0.0:
        return 1
    cum = np.cumsum(eigenvalues)
    return int(np.searchsorted(cum, fraction * total) + 1)


def evs_from_spectra(eigs1: np.ndarray, eigs2: np.ndarray) -> EVSResult:
    """Squared spectral gap over the joint 90%-energy prefix.

    Split out from :func:`evs` so spectra computed elsewhere (or written down
    by hand) can be compared directly.
    """
    eigs1 = np.asarray(eigs1, dtype=np.float64)
    eigs2 = np.asarray(eigs2, dtype=np.float64)
    k1 = energy_cutoff(eigs1)
    k2 = energy_cutoff(eigs2)
    k = min(k1, k2)
    diff = eigs1[:k] - eigs2[:k]
    return EVSResult(
        delta=float(diff @ diff),
        k=k,
        source=SpectralStats(eigs1, k1),
        target=SpectralStats(eigs2, k2),
    )


def evs(
    space1: EmbeddingSpace,
    space2: EmbeddingSpace,
    n_top: int = DEFAULT_N_TOP,
    k: int = DEFAULT_KNN,
) -> EVSResult:
    """Eigenvector similarity between two spaces (lower = more isomorphic).

    Both spaces are length-normalised internally; graphs are built over the
    ``n_top`` most frequent words of each side.
    """
    g1 = knn_graph(l2_normalize(space1.top(n_top)), k)
    g2 = knn_graph(l2_normalize(space2.top(n_top)), k)
    return evs_from_spectra(laplacian_spectrum(g1), laplacian_spectrum(g2))


# ---------------------------------------------------------------------------
# persistence diagrams and bottleneck distance


def _prim_mst_weights(X: np.ndarray) -> np.ndarray:
    """Edge weights of the Euclidean minimum spanning tree (Prim, O(n^2)).

    Runs on distances computed row-by-row, so zero-length edges between
    coincident points are kept (sparse-graph MST routines drop them).
    """
    n = X.shape[0]
    if n <= 1:
        return np.zeros(0, dtype=np.float64)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    diff = X - X[0]
    best = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    best[0] = np.inf
    weights = np.empty(n - 1, dtype=np.float64)
    for step in range(n - 1):
        j = int(np.argmin(np.where(in_tree, np.inf, best)))
        weights[step] = best[j]
        in_tree[j] = True
        diff = X - X[j]
        dist_j = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        best = np.minimum(best, dist_j)
    return weights


def rips_diagram0(
    space: Union[EmbeddingSpace, np.ndarray], n_top: Optional[int] = None
) -> np.ndarray:
    """0-dimensional Vietoris-Rips persistence diagram, as an (m, 2) array.

    Every component is born at 0; components die at the minimum spanning
    tree edge weights as clusters merge. The one essential class is mapped
    to (0, w_max) where w_max is the largest merge distance, which keeps the
    diagram finite for bottleneck comparisons.
    """
    X = space.matrix if isinstance(space, EmbeddingSpace) else check_matrix(space)
    if n_top is not None:
        X = X[: min(n_top, X.shape[0])]
    if X.shape[0] == 0:
        return np.zeros((0, 2), dtype=np.float64)
    deaths = np.sort(_prim_mst_weights(X))
    w_max = deaths[-1] if deaths.size else 0.0
    diagram = np.zeros((deaths.size + 1, 2), dtype=np.float64)
    diagram[:-1, 1] = deaths
    diagram[-1, 1] = w_max
    return diagram


def _linf(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise L-infinity distances between diagram points."""
    return np.maximum(
        np.abs(a[:, 0, None] - b[None, :, 0]),
        np.abs(a[:, 1, None] - b[None, :, 1]),
    )


def _bottleneck_feasible(d_pair, pers1, pers2, t) -> bool:
    """Is there a perfect matching of cost <= t between the diagrams,
    once each is padded with the other's diagonal projections?"""
    m, n = d_pair.shape
    top = np.concatenate([d_pair <= t, np.diag(pers1 <= t)], axis=1)
    bottom = np.concatenate(
        [np.diag(pers2 <= t), np.ones((n, m), dtype=bool)], axis=1
    )
    bi = csr_matrix(np.concatenate([top, bottom], axis=0))
    match = maximum_bipartite_matching(bi, perm_type="column")
    return int((match >= 0).sum()) == m + n


def bottleneck(diagram1: np.ndarray, diagram2: np.ndarray) -> float:
    """Bottleneck distance between two persistence diagrams.

    Exact on the candidate grid: the optimum is one of the pairwise
    L-infinity distances or half-persistences, located by binary search with
    a bipartite matching feasibility test at each probe.
    """
    d1 = np.asarray(diagram1, dtype=np.float64).reshape(-1, 2)
    d2 = np.asarray(diagram2, dtype=np.float64).reshape(-1, 2)
    if np.any(d1[:, 1] < d1[:, 0]) or np.any(d2[:, 1] < d2[:, 0]):
        raise ValueError("diagram points must satisfy death >= birth")
    pers1 = (d1[:, 1] - d1[:, 0]) / 2.0
    pers2 = (d2[:, 1] - d2[:, 0]) / 2.0
    if d1.shape[0] == 0 and d2.shape[0] == 0:
        return 0.0
    if d1.shape[0] == 0:
        return float(pers2.max())
    if d2.shape[0] == 0:
        return float(pers1.max())

    d_pair = _linf(d1, d2)
    candidates = np.unique(
        np.concatenate([[0.0], pers1, pers2, d_pair.ravel()])
    )
    lo, hi = 0, len(candidates) - 1
    # the largest candidate is always feasible (everything to the diagonal
    # costs at most max persistence, and max pairwise cost bounds the rest)
    while lo < hi:
        mid = (lo + hi) // 2
        if _bottleneck_feasible(d_pair, pers1, pers2, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def gh(
    space1: EmbeddingSpace,
    space2: EmbeddingSpace,
    n_top: int = DEFAULT_N_TOP,
) -> float:
    """Gromov-Hausdorff estimate between two spaces (lower = closer).

    Estimated as the bottleneck distance between the 0-dimensional
    Vietoris-Rips diagrams of the two point clouds. Working sets are the
    ``n_top`` most frequent words, length-normalised then mean-centered so
    the comparison is translation- and rotation-insensitive.
    """
    prepared = []
    for space in (space1, space2):
        sub = mean_center(l2_normalize(space.top(n_top)))
        prepared.append(rips_diagram0(sub, n_top))
    return bottleneck(prepared[0], prepared[1])


# ---------------------------------------------------------------------------
# Hausdorff distance


def hausdorff(a, b, metric: str = "euclidean") -> float:
    """Exact (symmetric) Hausdorff distance by full pairwise scan.

    ``metric`` is any distance id accepted by scipy's ``cdist`` (euclidean
    and cosine are the ones used here).
    """
    A = a.matrix if isinstance(a, EmbeddingSpace) else check_matrix(a, "a")
    B = b.matrix if isinstance(b, EmbeddingSpace) else check_matrix(b, "b")
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValueError("hausdorff distance needs non-empty point sets")
    d = cdist(A, B, metric=metric)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ---------------------------------------------------------------------------
# relational similarity


def rsim(
    space1: EmbeddingSpace,
    space2: EmbeddingSpace,
    dictionary: BilingualDictionary,
    m_pairs: int = 1000,
    seed: int = 0,
    sort: bool = True,
) -> float:
    """Correlation of intra-lingual similarity profiles over translation
    pairs (higher = more isomorphic; 1.0 for a rotated copy of a space).

    The dictionary is restricted to one-to-one pairs present in both
    vocabularies, shuffled with ``seed``, and the first ``m_pairs`` kept.
    For each side, cosine similarities of all word pairs among the sampled
    words form a list; with ``sort`` (the default) the two lists are sorted
    before correlating, which makes the measure independent of pair order.
    """
    if m_pairs < 3:
        raise ValueError("m_pairs must be >= 3")
    usable, _ = dictionary.restrict_to(space1, space2)
    usable = usable.one_to_one()
    if len(usable) < m_pairs:
        raise CoverageError(
            f"only {len(usable)} usable one-to-one pairs, need {m_pairs}",
            found=len(usable), needed=m_pairs,
        )
    order = np.random.default_rng(seed).permutation(len(usable))[:m_pairs]
    pairs = [usable.pairs[i] for i in order]

    sims = []
    for space, side in ((space1, 0), (space2, 1)):
        idx = np.array([space.index(p[side]) for p in pairs])
        X = space.matrix[idx]
        norms = np.linalg.norm(X, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("zero vector among sampled pair words")
        Xn = X / norms[:, None]
        cos = Xn @ Xn.T
        iu = np.triu_indices(len(pairs), k=1)
        sims.append(cos[iu])
    x, y = sims
    if sort:
        x = np.sort(x)
        y = np.sort(y)
    return pearson(x, y)
