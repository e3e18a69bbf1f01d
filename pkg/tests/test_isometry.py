import itertools

import numpy as np
import pytest

from isoalign.dictionaries import BilingualDictionary
from isoalign.errors import CoverageError, UndefinedCorrelationError
from isoalign.isometry import (
    NNGraph,
    bottleneck,
    energy_cutoff,
    evs,
    evs_from_spectra,
    gh,
    hausdorff,
    knn_graph,
    laplacian_spectrum,
    pearson,
    rips_diagram0,
    rsim,
)
from isoalign.spaces import EmbeddingSpace

from conftest import identity_dict, make_space


# ---------------------------------------------------------------------------
# independent oracles


def bottleneck_oracle(d1, d2):
    """Exhaustive bottleneck distance for diagrams with <= 6 points.

    Tries every way of matching a subset of d1 to a subset of d2 and sending
    the rest to the diagonal; the diagonal cost of (b, d) is (d - b) / 2.
    """
    d1 = [tuple(p) for p in d1]
    d2 = [tuple(p) for p in d2]

    def linf(p, q):
        return max(abs(p[0] - q[0]), abs(p[1] - q[1]))

    def diag(p):
        return (p[1] - p[0]) / 2.0

    best = np.inf
    n1, n2 = len(d1), len(d2)
    for k in range(min(n1, n2) + 1):
        for sub1 in itertools.combinations(range(n1), k):
            rest1 = [i for i in range(n1) if i not in sub1]
            for sub2 in itertools.permutations(range(n2), k):
                cost = 0.0
                for i, j in zip(sub1, sub2):
                    cost = max(cost, linf(d1[i], d2[j]))
                for i in rest1:
                    cost = max(cost, diag(d1[i]))
                for j in range(n2):
                    if j not in sub2:
                        cost = max(cost, diag(d2[j]))
                best = min(best, cost)
    return best


def charpoly_spectrum(adjacency):
    """Laplacian eigenvalues via characteristic polynomial roots (n <= 4)."""
    A = adjacency.astype(np.float64)
    L = np.diag(A.sum(axis=1)) - A
    roots = np.roots(np.poly(L))
    return np.sort(roots.real)[::-1]


def mst_weights_oracle(X):
    """Kruskal over all edges, tiny instances only."""
    n = len(X)
    edges = sorted(
        (float(np.linalg.norm(X[i] - X[j])), i, j)
        for i in range(n)
        for j in range(i + 1, n)
    )
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    out = []
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append(w)
    return sorted(out)


# ---------------------------------------------------------------------------
# pearson


def test_pearson_hand_value():
    # centered x=(-1,0,1), y=(-4/3,-1/3,5/3): cov=3, var=2*14/3
    got = pearson(np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 4.0]))
    assert abs(got - 3.0 * np.sqrt(21.0) / 14.0) < 1e-12


def test_pearson_perfect_and_inverse():
    x = np.array([1.0, 2.0, 5.0])
    assert abs(pearson(x, 3 * x + 1) - 1.0) < 1e-12
    assert abs(pearson(x, -x) + 1.0) < 1e-12


def test_pearson_zero_variance():
    with pytest.raises(UndefinedCorrelationError):
        pearson(np.array([1.0, 1.0, 1.0]), np.array([1.0, 2.0, 3.0]))


# ---------------------------------------------------------------------------
# knn graph and spectra


def test_knn_graph_shape_and_symmetry(small_space):
    g = knn_graph(small_space, k=5)
    assert g.adjacency.shape == (40, 40)
    assert (g.adjacency == g.adjacency.T).all()
    assert not g.adjacency.diagonal().any()
    # union symmetrisation can only add edges beyond k
    assert (g.degrees() >= 5).all()


def test_knn_graph_tie_breaks_to_lower_rank():
    # w1 and w2 are identical, both equally similar to w0: with k=1 each
    # must pick the lower-indexed candidate deterministically
    m = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 1.0], [0.0, 1.0]])
    space = EmbeddingSpace(("w0", "w1", "w2", "w3"), m)
    g = knn_graph(space, k=1)
    # w3's nearest by cosine: ties between w1 and w2 -> w1 (lower rank)
    assert g.adjacency[3, 1]
    assert not g.adjacency[3, 2]


def test_knn_graph_k_bounds(small_space):
    with pytest.raises(ValueError):
        knn_graph(small_space, k=0)
    with pytest.raises(ValueError):
        knn_graph(small_space, k=len(small_space))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_laplacian_matches_charpoly_roots(n):
    rng = np.random.default_rng(n)
    for _ in range(40):
        adj = rng.random((n, n)) < 0.5
        adj = np.triu(adj, 1)
        adj = adj | adj.T
        got = laplacian_spectrum(NNGraph(n=n, k=1, adjacency=adj))
        want = charpoly_spectrum(adj)
        np.testing.assert_allclose(got, want, atol=1e-8)


def test_complete_and_path_graph_spectra():
    k3 = np.ones((3, 3), dtype=bool) ^ np.eye(3, dtype=bool)
    p3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=bool)
    np.testing.assert_allclose(
        laplacian_spectrum(NNGraph(3, 1, k3)), [3.0, 3.0, 0.0], atol=1e-12
    )
    np.testing.assert_allclose(
        laplacian_spectrum(NNGraph(3, 1, p3)), [3.0, 1.0, 0.0], atol=1e-12
    )


def test_energy_cutoff_rule():
    # [3,1,0]: 3/4 < 0.9, (3+1)/4 >= 0.9 -> k=2
    assert energy_cutoff(np.array([3.0, 1.0, 0.0])) == 2
    # [3,3,0]: 3/6 < 0.9, 6/6 >= 0.9 -> k=2
    assert energy_cutoff(np.array([3.0, 3.0, 0.0])) == 2
    assert energy_cutoff(np.array([10.0, 0.5, 0.5])) == 1
    assert energy_cutoff(np.zeros(3)) == 1


def test_evs_hand_case_k3_vs_p3():
    res = evs_from_spectra(np.array([3.0, 3.0, 0.0]), np.array([3.0, 1.0, 0.0]))
    assert res.k == 2
    assert res.delta == 4.0


def test_evs_self_is_zero(small_space):
    assert evs(small_space, small_space, n_top=30, k=4).delta == 0.0


def test_evs_uses_min_cutoff():
    res = evs_from_spectra(
        np.array([10.0, 0.5, 0.5]), np.array([3.0, 1.0, 0.0])
    )
    assert res.source.k == 1
    assert res.target.k == 2
    assert res.k == 1
    assert res.delta == 49.0


# ---------------------------------------------------------------------------
# persistence diagrams and bottleneck


def test_rips_diagram_structure():
    X = np.array([[0.0], [1.0], [3.0]])
    dgm = rips_diagram0(X)
    # births all 0; deaths = sorted MST weights plus the essential class
    np.testing.assert_allclose(dgm[:, 0], 0.0)
    np.testing.assert_allclose(dgm[:, 1], [1.0, 2.0, 2.0])


def test_rips_diagram_handles_coincident_points():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    dgm = rips_diagram0(X)
    np.testing.assert_allclose(sorted(dgm[:, 1]), [0.0, 1.0, 1.0])


def test_mst_weights_match_kruskal():
    rng = np.random.default_rng(5)
    from isoalign.isometry import _prim_mst_weights

    for _ in range(30):
        X = rng.normal(size=(rng.integers(2, 9), 3))
        got = sorted(_prim_mst_weights(X))
        want = mst_weights_oracle(X)
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_bottleneck_identical_diagrams():
    d = np.array([[0.0, 1.0], [0.0, 2.5]])
    assert bottleneck(d, d) == 0.0


def test_bottleneck_hand_cases():
    d1 = np.array([[0.0, 1.0], [0.0, 2.0]])
    assert bottleneck(d1, np.array([[0.0, 1.5], [0.0, 2.0]])) == pytest.approx(0.5)
    # best option matches (0,1)<->(0,0.4) and sends (0,2) to the diagonal
    assert bottleneck(d1, np.array([[0.0, 0.4]])) == pytest.approx(1.0)
    assert bottleneck(np.zeros((0, 2)), np.array([[0.0, 0.4]])) == pytest.approx(0.2)
    assert bottleneck(np.zeros((0, 2)), np.zeros((0, 2))) == 0.0


def test_bottleneck_is_symmetric():
    rng = np.random.default_rng(6)
    for _ in range(20):
        d1 = np.column_stack([np.zeros(3), rng.random(3)])
        d2 = np.column_stack([np.zeros(4), rng.random(4)])
        assert bottleneck(d1, d2) == pytest.approx(bottleneck(d2, d1), abs=1e-12)


def test_bottleneck_matches_exhaustive_oracle():
    rng = np.random.default_rng(7)
    for trial in range(120):
        n1 = int(rng.integers(0, 6))
        n2 = int(rng.integers(0, 6))
        d1 = np.column_stack([np.zeros(n1), rng.random(n1) * 3])
        d2 = np.column_stack([np.zeros(n2), rng.random(n2) * 3])
        got = bottleneck(d1, d2)
        want = bottleneck_oracle(d1, d2)
        assert got == pytest.approx(want, abs=1e-12), f"trial {trial}"


def test_gh_zero_for_identical_and_rotated(paired_spaces):
    src, tgt, _ = paired_spaces
    assert gh(src, src, n_top=50) == 0.0
    assert gh(src, tgt, n_top=50) < 1e-8


def test_gh_positive_for_unrelated():
    a = make_space(50, 6, seed=10, prefix="a")
    b = make_space(50, 6, seed=11, prefix="b")
    assert gh(a, b, n_top=50) > 0.0


# ---------------------------------------------------------------------------
# hausdorff


def test_hausdorff_hand_cases():
    assert hausdorff(np.array([[0.0]]), np.array([[0.0], [5.0]])) == 5.0
    assert hausdorff(np.array([[0.0], [1.0]]), np.array([[0.4]])) == pytest.approx(0.6)
    X = np.random.default_rng(0).normal(size=(20, 3))
    assert hausdorff(X, X) == 0.0


# ---------------------------------------------------------------------------
# rsim


def test_rsim_identity(small_space):
    val = rsim(small_space, small_space, identity_dict(small_space), m_pairs=30)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_rsim_rotation_and_scale_invariant(paired_spaces):
    src, tgt, _ = paired_spaces
    d = BilingualDictionary(tuple(zip(src.words, tgt.words)))
    val = rsim(src, tgt, d, m_pairs=50, seed=3)
    assert val == pytest.approx(1.0, abs=1e-9)
    doubled = tgt.with_matrix(tgt.matrix * 2.0)
    assert rsim(src, doubled, d, m_pairs=50, seed=3) == val


def test_rsim_seeded_subsampling_is_deterministic(small_space):
    other = make_space(40, 8, seed=21)
    d = BilingualDictionary(tuple(zip(small_space.words, other.words)))
    a = rsim(small_space, other, d, m_pairs=20, seed=5)
    b = rsim(small_space, other, d, m_pairs=20, seed=5)
    c = rsim(small_space, other, d, m_pairs=20, seed=6)
    assert a == b
    assert a != c


def test_rsim_sorted_vs_unsorted(small_space):
    other = make_space(40, 8, seed=22)
    d = BilingualDictionary(tuple(zip(small_space.words, other.words)))
    s = rsim(small_space, other, d, m_pairs=30, seed=1, sort=True)
    u = rsim(small_space, other, d, m_pairs=30, seed=1, sort=False)
    # sorting compares distributions, not correspondences: always at least
    # as high for these unrelated spaces
    assert s > u


def test_rsim_coverage_error(small_space):
    d = BilingualDictionary((("w0", "w0"), ("w1", "w1"), ("w2", "w2")))
    with pytest.raises(CoverageError) as exc:
        rsim(small_space, small_space, d, m_pairs=10)
    assert exc.value.found == 3
    assert exc.value.needed == 10


def test_rsim_m_pairs_floor(small_space):
    with pytest.raises(ValueError):
        rsim(small_space, small_space, identity_dict(small_space), m_pairs=2)
