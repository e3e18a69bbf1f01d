import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isoalign.corpus import (
    DocCorpus,
    build_test_dict,
    frequency_bins,
    read_doc_alignment,
    read_doc_corpus,
    shuffle_sample,
    token_count,
    topic_adjusted_sample,
    write_doc_corpus,
)
from isoalign.dictionaries import BilingualDictionary
from isoalign.errors import CoverageError, ParseError

from conftest import make_space


def test_token_count():
    assert token_count(["a b c", "", "d e"]) == 5


class TestShuffleSample:
    def test_sizes_and_nesting(self):
        lines = [f"line {i}" for i in range(100)]
        samples = dict(shuffle_sample(lines, [10, 50, 100], seed=3))
        assert sorted(samples) == [10, 50, 100]
        assert samples[10] == samples[50][:10]
        assert samples[50] == samples[100][:50]
        assert sorted(samples[100]) == sorted(lines)

    def test_seed_determinism(self):
        lines = [str(i) for i in range(30)]
        a = shuffle_sample(lines, [15], seed=9)
        b = shuffle_sample(lines, [15], seed=9)
        c = shuffle_sample(lines, [15], seed=10)
        assert a == b
        assert a != c

    def test_out_of_range_size(self):
        with pytest.raises(ValueError):
            shuffle_sample(["a", "b"], [3], seed=0)
        with pytest.raises(ValueError):
            shuffle_sample(["a", "b"], [-1], seed=0)

    @given(
        n=st.integers(min_value=1, max_value=60),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=25, deadline=None)
    def test_prefix_property_holds_generally(self, n, seed):
        lines = [str(i) for i in range(n)]
        sizes = sorted({1, n // 2, n} - {0})
        samples = dict(shuffle_sample(lines, sizes, seed=seed))
        ordered = [samples[s] for s in sizes]
        for small, large in zip(ordered, ordered[1:]):
            assert large[: len(small)] == small


DOC_TEXT = """#doc alpha
the cat sat
on the mat
#doc beta
dogs bark loudly
"""


class TestDocCorpus:
    def test_parse(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text(DOC_TEXT)
        corpus = read_doc_corpus(p)
        assert corpus.ids() == ("alpha", "beta")
        assert corpus.get("alpha") == ("the cat sat", "on the mat")
        assert corpus.tokens() == 9
        assert len(corpus) == 2
        assert corpus.sentences() == [
            "the cat sat", "on the mat", "dogs bark loudly",
        ]

    def test_roundtrip(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text(DOC_TEXT)
        corpus = read_doc_corpus(p)
        q = tmp_path / "copy.txt"
        write_doc_corpus(corpus, q)
        assert read_doc_corpus(q) == corpus

    def test_header_without_id(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("#doc\nsentence\n")
        with pytest.raises(ParseError, match=":1:"):
            read_doc_corpus(p)

    def test_sentence_before_header(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("stray sentence\n#doc a\n")
        with pytest.raises(ParseError, match=":1:"):
            read_doc_corpus(p)

    def test_duplicate_doc_id(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("#doc a\nx y\n#doc a\nz\n")
        with pytest.raises(ParseError, match="duplicate"):
            read_doc_corpus(p)

    def test_get_missing_id(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text(DOC_TEXT)
        with pytest.raises(KeyError):
            read_doc_corpus(p).get("gamma")


class TestDocAlignment:
    def test_parse(self, tmp_path):
        p = tmp_path / "align.tsv"
        p.write_text("a1\tb1\n\na2\tb2\n")
        assert read_doc_alignment(p) == [("a1", "b1"), ("a2", "b2")]

    def test_bad_arity(self, tmp_path):
        p = tmp_path / "align.tsv"
        p.write_text("a1 b1 c1\n")
        with pytest.raises(ParseError, match=":1:"):
            read_doc_alignment(p)


def doc(doc_id, n_sentences, words_per_sentence, tag):
    sents = tuple(
        " ".join(f"{tag}{i}w{j}" for j in range(words_per_sentence))
        for i in range(n_sentences)
    )
    return (doc_id, sents)


class TestTopicSample:
    def test_budget_first_crossing(self):
        a = DocCorpus((doc("d1", 20, 5, "a"),))  # 100 tokens available
        b = DocCorpus((doc("d1", 4, 3, "b"),))   # budget 12
        sampled, report = topic_adjusted_sample(a, b, [("d1", "d1")], seed=1)
        (per,) = report.per_doc
        assert per.budget == 12
        # 5-token sentences: crossing 12 takes exactly 3 of them
        assert per.selected_tokens == 15
        assert per.selected_sentences == 3
        assert per.shortfall == 0
        assert report.total_selected == 15
        assert sampled.get("d1") == tuple(sampled.get("d1"))

    def test_sentences_keep_original_order(self):
        a = DocCorpus((doc("d1", 30, 4, "a"),))
        b = DocCorpus((doc("d1", 10, 4, "b"),))
        sampled, _ = topic_adjusted_sample(a, b, [("d1", "d1")], seed=7)
        original = a.get("d1")
        positions = [original.index(s) for s in sampled.get("d1")]
        assert positions == sorted(positions)

    def test_shortfall_reported_not_raised(self):
        a = DocCorpus((doc("d1", 2, 3, "a"),))   # only 6 tokens exist
        b = DocCorpus((doc("d1", 5, 4, "b"),))   # budget 20
        sampled, report = topic_adjusted_sample(a, b, [("d1", "d1")], seed=0)
        (per,) = report.per_doc
        assert per.selected_tokens == 6
        assert per.shortfall == 14
        assert report.total_shortfall == 14
        assert sampled.get("d1") == a.get("d1")

    def test_deterministic_per_seed(self):
        a = DocCorpus((doc("d1", 40, 3, "a"),))
        b = DocCorpus((doc("d1", 10, 3, "b"),))
        s1, _ = topic_adjusted_sample(a, b, [("d1", "d1")], seed=4)
        s2, _ = topic_adjusted_sample(a, b, [("d1", "d1")], seed=4)
        s3, _ = topic_adjusted_sample(a, b, [("d1", "d1")], seed=5)
        assert s1 == s2
        assert s1 != s3

    def test_unknown_alignment_ids(self):
        a = DocCorpus((doc("d1", 2, 3, "a"),))
        b = DocCorpus((doc("d1", 2, 3, "b"),))
        with pytest.raises(KeyError, match="corpus A"):
            topic_adjusted_sample(a, b, [("nope", "d1")])
        with pytest.raises(KeyError, match="corpus B"):
            topic_adjusted_sample(a, b, [("d1", "nope")])


class TestFrequencyBins:
    def test_rank_intervals(self):
        space = make_space(30, 4)
        bins = frequency_bins(space, [("top", 0, 10), ("mid", 10, 20)])
        assert bins["top"] == list(space.words[:10])
        assert bins["mid"] == list(space.words[10:20])

    def test_clipping_warns(self):
        space = make_space(10, 4)
        with pytest.warns(UserWarning, match="clipped"):
            bins = frequency_bins(space, [("big", 0, 50)])
        assert bins["big"] == list(space.words)

    def test_bad_interval(self):
        space = make_space(10, 4)
        with pytest.raises(ValueError):
            frequency_bins(space, [("bad", 5, 5)])


class TestBuildTestDict:
    def lexicon_for(self, space):
        return BilingualDictionary(tuple((w, w.upper()) for w in space.words))

    def test_quota_and_labels(self):
        space = make_space(40, 4)
        d = build_test_dict(
            space, self.lexicon_for(space), per_bin=5,
            bins=[("A", 0, 20), ("B", 20, 40)], seed=2,
        )
        assert len(d.pairs) == 10
        assert d.bins.count("A") == 5 and d.bins.count("B") == 5
        ranks = {w: i for i, w in enumerate(space.words)}
        for (s, t), label in zip(d.pairs, d.bins):
            assert t == s.upper()
            assert (ranks[s] < 20) == (label == "A")

    def test_excluded_words_skipped(self):
        space = make_space(20, 4)
        exclude = set(space.words[:10])
        d = build_test_dict(
            space, self.lexicon_for(space), per_bin=5,
            bins=[("A", 0, 20)], seed=0, exclude=exclude,
        )
        assert all(s not in exclude for s, _ in d.pairs)

    def test_deterministic(self):
        space = make_space(40, 4)
        lex = self.lexicon_for(space)
        kw = dict(per_bin=8, bins=[("A", 0, 40)])
        assert build_test_dict(space, lex, seed=1, **kw).pairs == build_test_dict(
            space, lex, seed=1, **kw
        ).pairs
        assert build_test_dict(space, lex, seed=1, **kw).pairs != build_test_dict(
            space, lex, seed=2, **kw
        ).pairs

    def test_unfillable_quota_raises(self):
        space = make_space(10, 4)
        lex = BilingualDictionary(tuple((w, w.upper()) for w in space.words[:3]))
        with pytest.raises(CoverageError) as exc:
            build_test_dict(space, lex, per_bin=5, bins=[("A", 0, 10)])
        assert exc.value.found == 3
        assert exc.value.needed == 5

    def test_first_listed_translation_wins(self):
        space = make_space(10, 4)
        w = space.words[0]
        lex = BilingualDictionary(
            tuple((x, x.upper()) for x in space.words) + ((w, "OTHER"),)
        )
        d = build_test_dict(space, lex, per_bin=10, bins=[("A", 0, 10)])
        assert dict(d.pairs)[w] == w.upper()
