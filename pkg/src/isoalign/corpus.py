"""Corpus sampling protocols.

Three things live here:

* nested sentence samples: one seeded shuffle of the corpus, prefixes of
  which give the sample at every requested size, so each smaller sample is a
  subset of every larger one;
* topic-adjusted sampling: given document-aligned corpora, sentences of each
  source document are sampled until the token count of its aligned partner
  is first met, so the two sides end up topically and volumetrically
  comparable;
* frequency-bin machinery for building binned test dictionaries.
"""

from __future__ import annotations

import warnings
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .dictionaries import BilingualDictionary
from .errors import CoverageError, ParseError
from .spaces import EmbeddingSpace

PathLike = Union[str, Path]

# rank intervals [lo, hi), following the usual high/mid/low-frequency split
DEFAULT_BINS = (
    ("HFREQ", 0, 5_000),
    ("MFREQ", 10_000, 20_000),
    ("LFREQ", 20_000, 50_000),
)


def token_count(lines: Iterable[str]) -> int:
    return sum(len(line.split()) for line in lines)


def shuffle_sample(
    lines: Sequence[str], sizes: Sequence[int], seed: int
) -> list[tuple[int, list[str]]]:
    """Nested sentence samples from one seeded permutation.

    The corpus is shuffled once; the sample of size ``k`` is the first ``k``
    lines of that shuffle. Consequently samples are nested: every smaller
    sample is a prefix (hence subset) of every larger one.
    """
    lines = list(lines)
    for size in sizes:
        if size < 0 or size > len(lines):
            raise ValueError(
                f"sample size {size} out of range for corpus of {len(lines)} lines"
            )
    perm = np.random.default_rng(seed).permutation(len(lines))
    return [(size, [lines[i] for i in perm[:size]]) for size in sizes]


# ---------------------------------------------------------------------------
# document-aligned corpora


@dataclass(frozen=True)
class DocCorpus:
    """A corpus split into identified documents."""

    documents: tuple  # of (doc_id, tuple-of-sentence-lines)

    def __len__(self):
        return len(self.documents)

    def ids(self) -> tuple:
        return tuple(doc_id for doc_id, _ in self.documents)

    def get(self, doc_id: str):
        for did, sentences in self.documents:
            if did == doc_id:
                return sentences
        raise KeyError(doc_id)

    def tokens(self) -> int:
        return sum(token_count(sents) for _, sents in self.documents)

    def sentences(self) -> list[str]:
        out = []
        for _, sents in self.documents:
            out.extend(sents)
        return out


def read_doc_corpus(path: PathLike) -> DocCorpus:
    """Parse the block format: ``#doc <id>`` headers, sentences below each."""
    path = Path(path)
    docs: list = []
    current_id: Optional[str] = None
    current: list[str] = []
    seen = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith("#doc"):
                fields = line.split(maxsplit=1)
                if len(fields) != 2 or not fields[1].strip():
                    raise ParseError(path, lineno, "expected '#doc <id>'")
                if current_id is not None:
                    docs.append((current_id, tuple(current)))
                current_id = fields[1].strip()
                if current_id in seen:
                    raise ParseError(path, lineno, f"duplicate doc id {current_id!r}")
                seen.add(current_id)
                current = []
            elif line.strip():
                if current_id is None:
                    raise ParseError(path, lineno, "sentence before any '#doc' header")
                current.append(line)
    if current_id is not None:
        docs.append((current_id, tuple(current)))
    return DocCorpus(tuple(docs))


def write_doc_corpus(corpus: DocCorpus, path: PathLike) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id, sentences in corpus.documents:
            fh.write(f"#doc {doc_id}\n")
            for s in sentences:
                fh.write(s + "\n")


def read_doc_alignment(path: PathLike) -> list[tuple[str, str]]:
    """Two-column TSV of aligned document ids."""
    path = Path(path)
    pairs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 2:
                raise ParseError(path, lineno, f"expected 2 columns, got {len(fields)}")
            pairs.append((fields[0], fields[1]))
    return pairs


class DocBudget(NamedTuple):
    doc_id: str
    budget: int
    selected_tokens: int
    selected_sentences: int
    shortfall: int


@dataclass(frozen=True)
class TopicSampleReport:
    per_doc: tuple  # of DocBudget
    total_budget: int
    total_selected: int

    @property
    def total_shortfall(self) -> int:
        return sum(d.shortfall for d in self.per_doc)


def topic_adjusted_sample(
    corpus_a: DocCorpus,
    corpus_b: DocCorpus,
    alignment: Sequence[tuple[str, str]],
    seed: int = 0,
) -> tuple[DocCorpus, TopicSampleReport]:
    """Sample corpus A so that, per aligned document, its token count first
    meets or exceeds that of the corresponding document in corpus B.

    Sentences are drawn in seeded random order (per document, derived from
    ``seed`` and the document id) and re-emitted in their original in-document
    order. Documents that run out of sentences before the budget are taken
    whole; the shortfall is reported, not raised.
    """
    ids_a = set(corpus_a.ids())
    ids_b = set(corpus_b.ids())
    for a, b in alignment:
        if a not in ids_a:
            raise KeyError(f"aligned doc id {a!r} missing from corpus A")
        if b not in ids_b:
            raise KeyError(f"aligned doc id {b!r} missing from corpus B")

    out_docs = []
    reports = []
    for a, b in alignment:
        sents = corpus_a.get(a)
        budget = token_count(corpus_b.get(b))
        rng = np.random.default_rng([seed, zlib.crc32(a.encode("utf-8"))])
        order = rng.permutation(len(sents))
        chosen: list[int] = []
        got = 0
        for i in order:
            if got >= budget:
                break
            chosen.append(int(i))
            got += len(sents[i].split())
        chosen.sort()
        selected = tuple(sents[i] for i in chosen)
        reports.append(
            DocBudget(
                doc_id=a,
                budget=budget,
                selected_tokens=got,
                selected_sentences=len(selected),
                shortfall=max(0, budget - got),
            )
        )
        out_docs.append((a, selected))
    report = TopicSampleReport(
        per_doc=tuple(reports),
        total_budget=sum(r.budget for r in reports),
        total_selected=sum(r.selected_tokens for r in reports),
    )
    return DocCorpus(tuple(out_docs)), report


# ---------------------------------------------------------------------------
# frequency bins and test dictionaries


def frequency_bins(
    space: EmbeddingSpace,
    bins: Sequence[tuple[str, int, int]] = DEFAULT_BINS,
) -> dict[str, list[str]]:
    """Words of a space grouped by rank interval.

    Bins reaching past the vocabulary are clipped with a warning so smaller
    desk-scale spaces remain usable.
    """
    V = len(space)
    out: dict[str, list[str]] = {}
    for name, lo, hi in bins:
        if not 0 <= lo < hi:
            raise ValueError(f"bad bin {name}: [{lo}, {hi})")
        if hi > V:
            warnings.warn(
                f"bin {name} [{lo}, {hi}) clipped to vocabulary size {V}",
                stacklevel=2,
            )
        out[name] = list(space.words[lo:min(hi, V)])
    return out


def build_test_dict(
    space: EmbeddingSpace,
    lexicon: BilingualDictionary,
    per_bin: int = 300,
    bins: Sequence[tuple[str, int, int]] = DEFAULT_BINS,
    seed: int = 0,
    exclude: Iterable[str] = (),
) -> BilingualDictionary:
    """Sample a frequency-binned test dictionary.

    From each bin, ``per_bin`` source words with at least one lexicon
    translation are drawn (seeded, without replacement), skipping anything in
    ``exclude`` (typically the seed-dictionary sources). Each sampled word
    contributes one pair: its first-listed translation. A bin that cannot
    fill its quota raises :class:`CoverageError` naming the deficit.
    """
    if per_bin < 1:
        raise ValueError("per_bin must be >= 1")
    excluded = set(exclude)
    by_bin = frequency_bins(space, bins)
    translations: dict[str, str] = {}
    for s, t in lexicon.pairs:
        translations.setdefault(s, t)

    rng = np.random.default_rng(seed)
    pairs: list[tuple[str, str]] = []
    labels: list[str] = []
    used: set[str] = set()
    for name, _, _ in bins:
        candidates = [
            w for w in by_bin[name]
            if w in translations and w not in excluded and w not in used
        ]
        if len(candidates) < per_bin:
            raise CoverageError(
                f"bin {name}: only {len(candidates)} candidate words with "
                f"translations, need {per_bin}",
                found=len(candidates), needed=per_bin,
            )
        take = rng.choice(len(candidates), size=per_bin, replace=False)
        for i in sorted(int(x) for x in take):
            w = candidates[i]
            pairs.append((w, translations[w]))
            labels.append(name)
            used.add(w)
    return BilingualDictionary(pairs, bins=labels, name="test")
