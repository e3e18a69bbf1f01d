"""Bundled reference tables.

These are stored measurement tables from full-scale training runs (complete
Wikipedia corpora, 15-epoch training, published bilingual dictionaries).
They are shipped as data so desk-scale runs have fixed points to compare and
regression-test against; nothing here is recomputed at import time.
"""

from __future__ import annotations

import csv
from importlib import resources

from .results import read_records

GAP_BLOCKS = ("eu", "qu", "gl", "ta", "ur")


def _data_path(name: str):
    return resources.files("isoalign.data").joinpath(name)


def bli_gap_records(block: str) -> list[dict]:
    """Full-scale BLI scores for one comparison block.

    Each block holds MRR rows for two language pairs (e.g. en-es and en-eu)
    under four corpus conditions: ``full-wiki``, ``random-sample``,
    ``comparable-sample`` and ``comparable-lemma``.
    """
    if block not in GAP_BLOCKS:
        raise ValueError(f"unknown gap block {block!r}, expected one of {GAP_BLOCKS}")
    return read_records(_data_path(f"bli_gap_{block}.csv"))


def full_training_reference() -> list[dict]:
    """Reference BLI/RSIM/GH/EVS scores for fully trained EN and ES spaces,
    computed on length-normalised vectors, broken down by frequency bin and
    test dictionary."""
    return read_records(_data_path("full_training_reference.csv"))


def token_count_vs_bli() -> list[dict]:
    """Per-language Wikipedia token counts with aligned BLI scores; the
    canonical size-predicts-quality scatter (rank correlation 0.72)."""
    return read_records(_data_path("token_count_vs_bli.csv"))


def wiki_sample_sizes() -> list[dict]:
    """Sentence-count to token-count metadata for the nested Wikipedia
    samples, with comparably sized Wikipedias in other languages."""
    rows = []
    with _data_path("wiki_sample_sizes.csv").open("r", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                {
                    "sentences": int(row["sentences"]),
                    "tokens_millions": float(row["tokens_millions"]),
                    "comparable_wikis": row["comparable_wikis"].split(";"),
                }
            )
    return rows
