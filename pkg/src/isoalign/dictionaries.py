"""Bilingual dictionaries: ordered translation pairs plus TSV reading/writing.

The file format is the common two-column one (``source<TAB>target``, a single
space also accepted), with an optional third column carrying a frequency-bin
label for test dictionaries.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import ParseError

PathLike = Union[str, Path]
Pair = Tuple[str, str]


class CoverageReport(NamedTuple):
    """How much of a dictionary survives vocabulary filtering."""

    n_pairs: int
    n_usable: int
    missing_source: int
    missing_target: int

    @property
    def fraction(self) -> float:
        return self.n_usable / self.n_pairs if self.n_pairs else 0.0


class BilingualDictionary:
    """An ordered list of (source, target) pairs, possibly many-to-many.

    Exact duplicate pairs are rejected; the same source with several targets
    is fine. ``bins`` optionally labels each pair (used by test dictionaries
    split into frequency bins).
    """

    def __init__(
        self,
        pairs: Iterable[Pair],
        bins: Optional[Sequence[Optional[str]]] = None,
        name: str = "",
    ):
        self.pairs: tuple[Pair, ...] = tuple((str(s), str(t)) for s, t in pairs)
        seen = set()
        for p in self.pairs:
            if p in seen:
                raise ValueError(f"duplicate pair {p!r}")
            seen.add(p)
        if bins is not None:
            bins = tuple(bins)
            if len(bins) != len(self.pairs):
                raise ValueError("bins must align with pairs")
        self.bins = bins
        self.name = name

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"BilingualDictionary({len(self)} pairs{label})"

    def sources(self) -> tuple[str, ...]:
        """Distinct source words in first-appearance order."""
        return tuple(dict.fromkeys(s for s, _ in self.pairs))

    def translations(self, source: str) -> tuple[str, ...]:
        """All targets listed for ``source``, in file order."""
        return tuple(t for s, t in self.pairs if s == source)

    def head(self, n: int) -> "BilingualDictionary":
        """The first ``n`` pairs (seed dictionaries of different sizes).

        ``n <= 0`` keeps everything, matching the CLI convention that a
        dictionary size of 0 means "use the whole file".
        """
        if n <= 0:
            return self
        bins = self.bins[:n] if self.bins is not None else None
        return BilingualDictionary(self.pairs[:n], bins, self.name)

    def restrict_to(self, source_vocab, target_vocab):
        """Keep pairs with both sides in vocabulary.

        Returns ``(dictionary, coverage)`` where the coverage report counts
        how many pairs were dropped on each side.
        """
        kept, kept_bins = [], []
        miss_s = miss_t = 0
        for i, (s, t) in enumerate(self.pairs):
            s_in, t_in = s in source_vocab, t in target_vocab
            if not s_in:
                miss_s += 1
            if not t_in:
                miss_t += 1
            if s_in and t_in:
                kept.append((s, t))
                if self.bins is not None:
                    kept_bins.append(self.bins[i])
        sub = BilingualDictionary(
            kept, kept_bins if self.bins is not None else None, self.name
        )
        report = CoverageReport(len(self.pairs), len(kept), miss_s, miss_t)
        return sub, report

    def one_to_one(self) -> "BilingualDictionary":
        """Greedy one-to-one subset: scanning in order, a pair is kept when
        neither its source nor its target has been used yet.

        Keeps the first listed translation of polysemous entries instead of
        throwing all of them away.
        """
        seen_s: set = set()
        seen_t: set = set()
        kept, kept_bins = [], []
        for i, (s, t) in enumerate(self.pairs):
            if s in seen_s or t in seen_t:
                continue
            seen_s.add(s)
            seen_t.add(t)
            kept.append((s, t))
            if self.bins is not None:
                kept_bins.append(self.bins[i])
        return BilingualDictionary(
            kept, kept_bins if self.bins is not None else None, self.name
        )


def read_dictionary(path: PathLike, name: str = "") -> BilingualDictionary:
    """Read a two- or three-column dictionary file.

    Exact duplicate pairs are dropped (first occurrence wins) since published
    dictionaries occasionally contain them; any other malformed line raises
    :class:`ParseError`.
    """
    path = Path(path)
    pairs: list[Pair] = []
    bins: list[Optional[str]] = []
    seen = set()
    any_bin = False
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) == 2:
                s, t = fields
                b = None
            elif len(fields) == 3:
                s, t, b = fields
                any_bin = True
            else:
                raise ParseError(
                    path, lineno, f"expected 2 or 3 columns, got {len(fields)}"
                )
            if (s, t) in seen:
                continue
            seen.add((s, t))
            pairs.append((s, t))
            bins.append(b)
    return BilingualDictionary(
        pairs, bins if any_bin else None, name or path.stem
    )


def write_dictionary(dictionary: BilingualDictionary, path: PathLike) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for i, (s, t) in enumerate(dictionary.pairs):
            if dictionary.bins is not None and dictionary.bins[i] is not None:
                fh.write(f"{s}\t{t}\t{dictionary.bins[i]}\n")
            else:
                fh.write(f"{s}\t{t}\n")
