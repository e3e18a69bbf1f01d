import pytest

from isoalign.fixtures import (
    GAP_BLOCKS,
    bli_gap_records,
    full_training_reference,
    token_count_vs_bli,
    wiki_sample_sizes,
)
from isoalign.results import RECORD_FIELDS


@pytest.mark.parametrize("block", GAP_BLOCKS)
def test_gap_blocks_load_with_two_pairs(block):
    records = bli_gap_records(block)
    assert len(records) == 8
    assert all(set(RECORD_FIELDS) <= set(r) for r in records)
    pairs = {r["pair"] for r in records}
    assert len(pairs) == 2
    assert "en-es" in pairs or block in ("ta", "ur", "qu", "gl")
    values = {r["value"] for r in records}
    assert values == {
        "full-wiki", "random-sample", "comparable-sample", "comparable-lemma",
    }


def test_unknown_gap_block():
    with pytest.raises(ValueError, match="unknown gap block"):
        bli_gap_records("xx")


def test_full_training_reference_has_all_metrics():
    records = full_training_reference()
    metrics = {r["metric"] for r in records}
    assert metrics == {"mrr", "rsim", "gh", "evs"}
    assert all(isinstance(r["score"], float) for r in records)


def test_token_count_scatter_loads():
    records = token_count_vs_bli()
    assert len(records) >= 20
    assert {r["metric"] for r in records} == {"mrr"}
    assert {r["kind"] for r in records} == {"tokens"}
    assert all(int(r["value"]) > 0 for r in records)


def test_wiki_sample_sizes_parse():
    rows = wiki_sample_sizes()
    assert all(row["sentences"] > 0 for row in rows)
    assert all(row["tokens_millions"] > 0 for row in rows)
    assert all(isinstance(row["comparable_wikis"], list) for row in rows)
    sentences = [row["sentences"] for row in rows]
    assert sentences == sorted(sentences)
