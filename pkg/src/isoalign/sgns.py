"""Skip-gram negative-sampling trainer with token-exact snapshots.

This is a compact re-implementation of the usual SGNS recipe (dynamic
window, frequency subsampling, unigram^0.75 negative sampling, linear
learning-rate decay, optional hashed character n-gram subwords) with one
twist the experiments need: snapshots of the vector space can be requested
at exact raw-token budgets.  After any sentence whose processing pushes the
consumed-token counter past a requested budget M the current vectors are
emitted, so "the space after M tokens" means the same thing across runs and
corpora.

Training is single-threaded and fully deterministic given the seed: all
randomness comes from one 64-bit LCG that lives in the inner loop.  The
numerics run in float32 (as is standard for this model family); the
analytic loss/gradient helpers used for verification are float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from numba import njit

from .errors import DivergenceError, UnreachableBudgetError
from .spaces import EmbeddingSpace

# LCG constants (Knuth's MMIX).
_LCG_A = np.uint64(6364136223846793005)
_LCG_C = np.uint64(1442695040888963407)

# How many raw tokens may pass between divergence spot-checks.
_CHECK_INTERVAL = 200_000


def fnv1a32(data: bytes) -> int:
    """32-bit FNV-1a hash."""
    h = 2166136261
    for byte in data:
        h = ((h ^ byte) * 16777619) & 0xFFFFFFFF
    return h


def ngram_strings(word: str, n_min: int, n_max: int) -> list:
    """Character n-grams of the boundary-wrapped word, shortest first.

    The wrapped form ``<word>`` is enumerated for every n in
    ``[n_min, n_max]``; when its full length falls in that range the whole
    wrapped word shows up as one of its own n-grams, as usual.
    """
    wrapped = "<" + word + ">"
    grams = []
    for n in range(n_min, n_max + 1):
        for i in range(len(wrapped) - n + 1):
            grams.append(wrapped[i : i + n])
    return grams


def subword_ngrams(word: str, n_min: int, n_max: int, buckets: int) -> np.ndarray:
    """Hash bucket ids for the word's character n-grams.

    May be empty when the wrapped word is shorter than ``n_min``; the word is
    then represented by its whole-word vocabulary row alone.
    """
    if not 1 <= n_min <= n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    if buckets < 1:
        raise ValueError("buckets must be >= 1")
    ids = [fnv1a32(g.encode("utf-8")) % buckets for g in ngram_strings(word, n_min, n_max)]
    return np.array(ids, dtype=np.int32)


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 300
    window: int = 5
    negatives: int = 15
    learning_rate: float = 0.025
    epochs: int = 15
    min_count: int = 5
    subsample_t: float = 1e-4
    subwords: bool = True
    n_min: int = 3
    n_max: int = 6
    buckets: int = 2_000_000
    seed: int = 1

    def __post_init__(self):
        positive = [
            ("dim", self.dim), ("window", self.window),
            ("negatives", self.negatives), ("learning_rate", self.learning_rate),
            ("epochs", self.epochs), ("min_count", self.min_count),
            ("subsample_t", self.subsample_t), ("n_min", self.n_min),
            ("n_max", self.n_max), ("buckets", self.buckets),
        ]
        for name, value in positive:
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")

    def with_(self, **kwargs) -> "TrainConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Vocabulary:
    """Count-sorted vocabulary (ties broken alphabetically)."""

    words: tuple
    counts: np.ndarray
    raw_tokens: int   # all corpus tokens, including dropped ones
    kept_tokens: int  # tokens covered by the surviving vocabulary
    index: dict = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.words)


def build_vocab(sentences: Sequence[Sequence[str]], min_count: int) -> Vocabulary:
    counts: dict[str, int] = {}
    raw = 0
    for sent in sentences:
        raw += len(sent)
        for tok in sent:
            counts[tok] = counts.get(tok, 0) + 1
    items = [(w, c) for w, c in counts.items() if c >= min_count]
    items.sort(key=lambda wc: (-wc[1], wc[0]))
    words = tuple(w for w, _ in items)
    arr = np.array([c for _, c in items], dtype=np.int64)
    return Vocabulary(
        words=words,
        counts=arr,
        raw_tokens=raw,
        kept_tokens=int(arr.sum()) if arr.size else 0,
        index={w: i for i, w in enumerate(words)},
    )


class Snapshot(NamedTuple):
    budget: int    # the requested raw-token budget M
    consumed: int  # raw tokens actually consumed at emission
    space: EmbeddingSpace


@dataclass(frozen=True)
class TrainResult:
    snapshots: tuple           # of Snapshot, in budget order
    final: EmbeddingSpace
    vocab: Vocabulary
    consumed_tokens: int


# ---------------------------------------------------------------------------
# float64 loss/gradient reference (used for verification and nothing else)


def _sigmoid(x):
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def sgns_loss(center: np.ndarray, context: np.ndarray, negatives: np.ndarray) -> float:
    """Negative-sampling loss for one (center, context, negatives) triple."""
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64).reshape(-1, center.size)
    pos = float(context @ center)
    neg = negatives @ center
    s_pos = _sigmoid(np.array([pos]))[0]
    s_neg = _sigmoid(-neg)
    eps = np.finfo(np.float64).tiny
    return float(-np.log(s_pos + eps) - np.log(s_neg + eps).sum())


def sgns_gradients(center, context, negatives):
    """Analytic gradients of :func:`sgns_loss` w.r.t. all three arguments."""
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64).reshape(-1, center.size)
    g_pos = _sigmoid(np.array([context @ center]))[0] - 1.0   # sigma - label
    g_neg = _sigmoid(negatives @ center)
    g_center = g_pos * context + g_neg @ negatives
    g_context = g_pos * center
    g_negatives = g_neg[:, None] * center[None, :]
    return g_center, g_context, g_negatives


# ---------------------------------------------------------------------------
# the training kernel


@njit(cache=True, fastmath=True)
def _train_chunk(
    ids, offsets, raw_lens, vin, vout, ntable, keep,
    window, negatives, lr, planned, consumed, state,
    ngram_rows, ngram_off, use_subwords,
):
    dim = vin.shape[1]
    tsize = np.uint64(len(ntable))
    hbuf = np.empty(dim, dtype=np.float32)
    gbuf = np.empty(dim, dtype=np.float32)
    for s in range(len(offsets) - 1):
        alpha = np.float32(lr * (1.0 - consumed / planned))
        lo, hi = offsets[s], offsets[s + 1]
        kept = np.empty(hi - lo, dtype=np.int32)
        m = 0
        for t in range(lo, hi):
            w = ids[t]
            state = state * _LCG_A + _LCG_C
            u = np.float64(state >> np.uint64(11)) / 9007199254740992.0
            if keep[w] >= u:
                kept[m] = w
                m += 1
        for i in range(m):
            c = kept[i]
            state = state * _LCG_A + _LCG_C
            b = np.int64(state % np.uint64(window)) + 1

            n_g = np.int64(0)
            g_lo = np.int64(0)
            g_hi = np.int64(0)
            if use_subwords:
                g_lo, g_hi = ngram_off[c], ngram_off[c + 1]
                n_g = g_hi - g_lo
                inv = np.float32(1.0 / n_g) if n_g > 0 else np.float32(0.0)
                for d in range(dim):
                    hbuf[d] = vin[c, d]
                for gi in range(g_lo, g_hi):
                    row = ngram_rows[gi]
                    for d in range(dim):
                        hbuf[d] += inv * vin[row, d]
            else:
                for d in range(dim):
                    hbuf[d] = vin[c, d]

            for j in range(max(0, i - b), min(m, i + b + 1)):
                if j == i:
                    continue
                o = kept[j]
                for d in range(dim):
                    gbuf[d] = np.float32(0.0)
                for k in range(negatives + 1):
                    if k == 0:
                        n = np.int64(o)
                        label = np.float32(1.0)
                    else:
                        state = state * _LCG_A + _LCG_C
                        n = np.int64(ntable[np.int64(state % tsize)])
                        if n == o:
                            continue
                        label = np.float32(0.0)
                    dot = np.float32(0.0)
                    for d in range(dim):
                        dot += hbuf[d] * vout[n, d]
                    if dot >= 0.0:
                        sig = np.float32(1.0) / (np.float32(1.0) + np.float32(np.exp(-dot)))
                    else:
                        e = np.float32(np.exp(dot))
                        sig = e / (np.float32(1.0) + e)
                    g = sig - label
                    ga = g * alpha
                    for d in range(dim):
                        gbuf[d] += g * vout[n, d]
                        vout[n, d] -= ga * hbuf[d]
                if use_subwords and n_g > 0:
                    inv = np.float32(1.0 / n_g)
                    for d in range(dim):
                        delta = alpha * gbuf[d]
                        vin[c, d] -= delta
                        gbuf[d] = delta * inv
                    for gi in range(g_lo, g_hi):
                        row = ngram_rows[gi]
                        for d in range(dim):
                            vin[row, d] -= gbuf[d]
                else:
                    for d in range(dim):
                        vin[c, d] -= alpha * gbuf[d]
        consumed += raw_lens[s]
    return state, consumed


@njit(cache=True)
def _emit_word_matrix(vin, ngram_rows, ngram_off, n_words):
    """Word vector = whole-word row (+ mean of its subword rows)."""
    dim = vin.shape[1]
    out = np.empty((n_words, dim), dtype=np.float64)
    for w in range(n_words):
        for d in range(dim):
            out[w, d] = vin[w, d]
        lo, hi = ngram_off[w], ngram_off[w + 1]
        if hi > lo:
            inv = 1.0 / (hi - lo)
            for gi in range(lo, hi):
                row = ngram_rows[gi]
                for d in range(dim):
                    out[w, d] += inv * vin[row, d]
    return out


# ---------------------------------------------------------------------------
# orchestration


def _as_sentences(corpus) -> list:
    if isinstance(corpus, (str, Path)):
        sentences = []
        with Path(corpus).open("r", encoding="utf-8") as fh:
            for line in fh:
                toks = line.split()
                if toks:
                    sentences.append(toks)
        return sentences
    return [list(s) for s in corpus if len(s)]


def _negative_table(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(np.float64) ** 0.75
    probs = weights / weights.sum()
    size = max(1_000_000, 16 * len(counts))
    slots = np.maximum(1, np.round(probs * size)).astype(np.int64)
    return np.repeat(np.arange(len(counts), dtype=np.int32), slots)


def _keep_probs(counts: np.ndarray, kept_tokens: int, t: float) -> np.ndarray:
    freq = counts.astype(np.float64) / kept_tokens
    keep = np.sqrt(t / freq) + t / freq
    return np.minimum(keep, 1.0)


def _spot_check(vin, vout, n_words, consumed):
    step = max(1, n_words // 512)
    sample = vin[:n_words:step]
    if not (np.isfinite(sample).all() and np.isfinite(vout[::step]).all()):
        raise DivergenceError(consumed)


def train(
    corpus: Union[str, Path, Sequence[Sequence[str]]],
    config: TrainConfig = TrainConfig(),
    snapshot_plan: Optional[Sequence[int]] = None,
) -> TrainResult:
    """Train SGNS vectors, emitting a snapshot at each raw-token budget.

    ``snapshot_plan`` is a strictly increasing list of raw-token budgets M;
    each snapshot is taken at the first sentence boundary where the
    consumed-token counter (counting *every* corpus token, before
    subsampling or vocabulary filtering, across epochs) reaches M.  Budgets
    beyond ``epochs * corpus_tokens`` raise
    :class:`~isoalign.errors.UnreachableBudgetError`.
    """
    sentences = _as_sentences(corpus)
    vocab = build_vocab(sentences, config.min_count)
    if len(vocab) == 0:
        raise ValueError("no words survive min_count; corpus too small?")

    plan = [int(m) for m in (snapshot_plan or ())]
    if any(m <= 0 for m in plan):
        raise ValueError("snapshot budgets must be positive")
    if any(b <= a for a, b in zip(plan, plan[1:])):
        raise ValueError("snapshot budgets must be strictly increasing")
    planned_total = config.epochs * vocab.raw_tokens
    bad = [m for m in plan if m > planned_total]
    if bad:
        raise UnreachableBudgetError(bad, planned_total)

    # token id stream (in-vocab only) + raw per-sentence lengths
    id_list, offsets, raw_lens = [], [0], []
    for sent in sentences:
        raw_lens.append(len(sent))
        for tok in sent:
            i = vocab.index.get(tok)
            if i is not None:
                id_list.append(i)
        offsets.append(len(id_list))
    ids = np.array(id_list, dtype=np.int32)
    offsets = np.array(offsets, dtype=np.int64)
    raw_lens = np.array(raw_lens, dtype=np.int64)

    # subword decomposition, flattened
    V = len(vocab)
    if config.subwords:
        per_word = [
            V + subword_ngrams(w, config.n_min, config.n_max, config.buckets)
            for w in vocab.words
        ]
        ngram_off = np.zeros(V + 1, dtype=np.int64)
        ngram_off[1:] = np.cumsum([len(g) for g in per_word])
        ngram_rows = (
            np.concatenate(per_word).astype(np.int32)
            if ngram_off[-1] else np.zeros(0, dtype=np.int32)
        )
        n_rows = V + config.buckets
    else:
        ngram_off = np.zeros(V + 1, dtype=np.int64)
        ngram_rows = np.zeros(0, dtype=np.int32)
        n_rows = V

    rng = np.random.default_rng(config.seed)
    vin = ((rng.random((n_rows, config.dim)) - 0.5) / config.dim).astype(np.float32)
    vout = np.zeros((V, config.dim), dtype=np.float32)

    ntable = _negative_table(vocab.counts)
    keep = _keep_probs(vocab.counts, vocab.kept_tokens, config.subsample_t)

    seed_state = config.seed * 2654435761 % (2**64) or 1
    for _ in range(8):  # scramble away from small seeds
        seed_state = (seed_state * int(_LCG_A) + int(_LCG_C)) % (2**64)
    state = np.uint64(seed_state)

    def emit() -> EmbeddingSpace:
        if config.subwords:
            matrix = _emit_word_matrix(vin, ngram_rows, ngram_off, V)
        else:
            matrix = vin[:V].astype(np.float64)
        if not np.isfinite(matrix).all():
            raise DivergenceError(consumed)
        return EmbeddingSpace(vocab.words, matrix, vocab.counts)

    snapshots: list[Snapshot] = []
    next_plan = 0
    consumed = 0
    n_sent = len(sentences)
    cum_raw = np.cumsum(raw_lens)
    epoch_tokens = int(cum_raw[-1]) if n_sent else 0

    for epoch in range(config.epochs):
        s = 0
        while s < n_sent:
            base = epoch * epoch_tokens
            stop_tokens = consumed - base + _CHECK_INTERVAL
            if next_plan < len(plan):
                stop_tokens = min(stop_tokens, plan[next_plan] - base)
            # first sentence index whose cumulative count reaches the stop
            e = int(np.searchsorted(cum_raw[s:], max(stop_tokens, cum_raw[s]))) + s
            e = min(e + 1, n_sent)
            state, consumed = _train_chunk(
                ids, offsets[s : e + 1], raw_lens[s:e], vin, vout,
                ntable, keep, config.window, config.negatives,
                config.learning_rate, planned_total, consumed, state,
                ngram_rows, ngram_off, config.subwords,
            )
            # numba hands uint64 back as a Python int; rewrap or the next
            # call overflows the int64 default
            state = np.uint64(state)
            consumed = int(consumed)
            _spot_check(vin, vout, V, consumed)
            while next_plan < len(plan) and consumed >= plan[next_plan]:
                snapshots.append(Snapshot(plan[next_plan], consumed, emit()))
                next_plan += 1
            s = e

    return TrainResult(
        snapshots=tuple(snapshots),
        final=emit(),
        vocab=vocab,
        consumed_tokens=consumed,
    )
