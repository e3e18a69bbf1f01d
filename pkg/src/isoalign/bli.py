"""Bilingual lexicon induction scoring.

Evaluation is retrieval over the *full* target vocabulary by cosine, scored
with mean reciprocal rank at a cutoff. Out-of-vocabulary queries are skipped
and reported rather than counted as failures, so scores stay comparable
across spaces with different coverage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dictionaries import BilingualDictionary, CoverageReport
from .preprocess import _l2_rows
from .spaces import EmbeddingSpace

DEFAULT_CUTOFF = 10


@dataclass(frozen=True)
class QueryResult:
    query: str
    gold: tuple
    rank: int  # 1-based rank of the best gold translation
    rr: float  # 1/rank if rank <= cutoff else 0.0
    bin: Optional[str] = None


@dataclass(frozen=True)
class BliReport:
    mrr: float
    n_queries: int
    n_skipped: int
    coverage: CoverageReport
    results: tuple
    bin_mrr: dict

    def __repr__(self):
        return (
            f"BliReport(mrr={self.mrr:.4f}, n={self.n_queries}, "
            f"skipped={self.n_skipped})"
        )


def retrieve(query_vector: np.ndarray, target: EmbeddingSpace, cutoff: int = DEFAULT_CUTOFF):
    """Top-``cutoff`` target words for one query vector, by cosine.

    Ties are resolved towards the more frequent word, so results are
    deterministic.
    """
    scores = _scores(np.asarray(query_vector, dtype=np.float64), target)
    order = np.argsort(-scores, kind="stable")[:cutoff]
    return [(target.words[i], float(scores[i])) for i in order]


def _scores(query_vector: np.ndarray, target: EmbeddingSpace) -> np.ndarray:
    qn = np.linalg.norm(query_vector)
    if qn == 0.0:
        raise ValueError("zero query vector has no cosine neighbours")
    T = _l2_rows(target.matrix, target.words)
    return T @ (query_vector / qn)


def _rank_of_best_gold(scores: np.ndarray, gold_idx: list[int]) -> int:
    """1-based retrieval rank of the best-ranked gold word, with cosine ties
    broken by target frequency rank (exact, no full sort needed)."""
    best = None
    for g in gold_idx:
        s = scores[g]
        rank = 1 + int((scores > s).sum()) + int((scores[:g] == s).sum())
        if best is None or rank < best:
            best = rank
    return best


def evaluate_mrr(
    mapped_source: EmbeddingSpace,
    target: EmbeddingSpace,
    dictionary: BilingualDictionary,
    cutoff: int = DEFAULT_CUTOFF,
) -> BliReport:
    """Mean reciprocal rank of gold translations under cosine retrieval.

    Pairs sharing a source word form one query with a gold *set*. Queries
    whose source is missing from the mapped space, or whose gold translations
    are all missing from the target, are skipped and reported. ``bin_mrr``
    breaks the score down by the dictionary's frequency-bin labels when it
    has them.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    _, coverage = dictionary.restrict_to(mapped_source, target)

    gold: dict[str, list[str]] = {}
    bins: dict[str, Optional[str]] = {}
    for i, (s, t) in enumerate(dictionary.pairs):
        gold.setdefault(s, []).append(t)
        if s not in bins:
            bins[s] = dictionary.bins[i] if dictionary.bins is not None else None

    Tn = _l2_rows(target.matrix, target.words)
    results = []
    skipped = 0
    for s, translations in gold.items():
        if s not in mapped_source:
            skipped += 1
            continue
        gold_idx = [target.index(t) for t in translations if t in target]
        if not gold_idx:
            skipped += 1
            continue
        q = mapped_source.vector(s)
        qn = np.linalg.norm(q)
        if qn == 0.0:
            raise ValueError(f"zero vector for query word {s!r}")
        scores = Tn @ (q / qn)
        rank = _rank_of_best_gold(scores, gold_idx)
        rr = 1.0 / rank if rank <= cutoff else 0.0
        results.append(
            QueryResult(query=s, gold=tuple(translations), rank=rank, rr=rr, bin=bins[s])
        )

    n = len(results)
    mrr = float(np.mean([r.rr for r in results])) if n else 0.0
    bin_mrr: dict = {}
    for label in sorted({r.bin for r in results if r.bin is not None}):
        got = [r.rr for r in results if r.bin == label]
        bin_mrr[label] = float(np.mean(got))
    return BliReport(
        mrr=mrr,
        n_queries=n,
        n_skipped=skipped,
        coverage=coverage,
        results=tuple(results),
        bin_mrr=bin_mrr,
    )
