"""Word vector spaces and their on-disk text format.

A space is an ordered vocabulary plus a row-per-word matrix.  Word order is
meaningful everywhere in this package: row ``i`` belongs to the ``i``-th most
frequent word, and rank-based operations (top-``n`` truncation, frequency
bins) rely on it.

The file format is the usual text one: a ``"V d"`` header line followed by
``V`` lines of ``word v1 ... vd`` separated by single spaces.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .errors import DuplicateWordError, ParseError

PathLike = Union[str, Path]


class EmbeddingSpace:
    """An immutable (vocabulary, matrix) pair with optional corpus counts.

    Parameters
    ----------
    words : sequence of str
        Vocabulary in frequency order (most frequent first). Must be unique.
    matrix : array of shape (len(words), dim)
        One row per word. Coerced to float64; must be finite.
    counts : sequence of int, optional
        Raw corpus frequency per word. When present it must be non-increasing,
        consistent with the frequency ordering of ``words``.
    """

    def __init__(self, words: Sequence[str], matrix, counts=None):
        self.words: tuple[str, ...] = tuple(words)
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-dimensional, got shape {matrix.shape}")
        if matrix.shape[0] != len(self.words):
            raise ValueError(
                f"{len(self.words)} words but matrix has {matrix.shape[0]} rows"
            )
        if matrix.size and not np.isfinite(matrix).all():
            raise ValueError("matrix contains non-finite values")
        if matrix.flags.writeable:
            matrix = matrix.copy()
        matrix.flags.writeable = False
        self.matrix: np.ndarray = matrix

        if counts is not None:
            counts = np.asarray(counts, dtype=np.int64)
            if counts.shape != (len(self.words),):
                raise ValueError("counts must align with words")
            if counts.size > 1 and np.any(np.diff(counts) > 0):
                raise ValueError("counts must be non-increasing (frequency order)")
            counts.flags.writeable = False
        self.counts: Optional[np.ndarray] = counts

        self._index = {w: i for i, w in enumerate(self.words)}
        if len(self._index) != len(self.words):
            seen = set()
            for w in self.words:
                if w in seen:
                    raise ValueError(f"duplicate word in vocabulary: {w!r}")
                seen.add(w)

    # -- basic container behaviour ------------------------------------

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def __repr__(self) -> str:
        return f"EmbeddingSpace({len(self)} words, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def index(self, word: str) -> int:
        """Rank of ``word`` (0 = most frequent). Raises KeyError if absent."""
        return self._index[word]

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self._index[word]]

    # -- derived spaces ------------------------------------------------

    def top(self, n: int) -> "EmbeddingSpace":
        """The sub-space of the ``n`` most frequent words."""
        if n < 0:
            raise ValueError("n must be non-negative")
        n = min(n, len(self))
        counts = None if self.counts is None else self.counts[:n]
        return EmbeddingSpace(self.words[:n], self.matrix[:n], counts)

    def with_matrix(self, matrix) -> "EmbeddingSpace":
        """Same vocabulary and counts, different vectors."""
        return EmbeddingSpace(self.words, matrix, self.counts)


def load_embeddings(path: PathLike, limit: Optional[int] = None) -> EmbeddingSpace:
    """Read a text-format vector file.

    ``limit`` keeps only the first ``min(V, limit)`` rows, which is the usual
    way to work with the frequency-sorted published files.  Malformed input
    raises :class:`ParseError` naming the 1-based line.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise ParseError(path, 1, "empty file, expected 'V d' header")
        parts = header.split()
        if len(parts) != 2:
            raise ParseError(path, 1, f"expected 'V d' header, got {header.strip()!r}")
        try:
            declared, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(path, 1, f"non-integer header {header.strip()!r}") from None
        if declared < 0 or dim < 0:
            raise ParseError(path, 1, "header values must be non-negative")

        n_rows = declared if limit is None else min(declared, max(limit, 0))
        words: list[str] = []
        index: dict[str, int] = {}
        matrix = np.empty((n_rows, dim), dtype=np.float64)

        for i in range(n_rows):
            lineno = i + 2
            line = fh.readline()
            if not line:
                raise ParseError(
                    path, lineno, f"expected {declared} rows, file ended after {i}"
                )
            fields = line.rstrip("\n").split()
            if len(fields) != dim + 1:
                raise ParseError(
                    path, lineno,
                    f"expected word + {dim} values, got {len(fields)} fields",
                )
            word = fields[0]
            if word in index:
                raise DuplicateWordError(path, lineno, f"duplicate word {word!r}")
            try:
                row = np.array(fields[1:], dtype=np.float64)
            except ValueError:
                raise ParseError(path, lineno, "unparseable vector value") from None
            if not np.isfinite(row).all():
                raise ParseError(path, lineno, f"non-finite value for word {word!r}")
            index[word] = i
            words.append(word)
            matrix[i] = row

        if limit is None:
            extra = fh.readline()
            if extra.strip():
                raise ParseError(
                    path, n_rows + 2, f"header declared {declared} rows but file has more"
                )

    return EmbeddingSpace(words, matrix)


def save_embeddings(space: EmbeddingSpace, path: PathLike) -> None:
    """Write ``space`` in the text format. Values keep 8 significant digits,
    so a save/load roundtrip changes entries by well under 1e-6."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for word, row in zip(space.words, space.matrix):
            fh.write(word)
            for v in row:
                fh.write(" %.8g" % v)
            fh.write("\n")
