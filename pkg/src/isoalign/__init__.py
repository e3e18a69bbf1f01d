"""Measure how close two monolingual embedding spaces are to isometric.

The package covers the full pipeline: corpus sampling, skip-gram training
with token-budget snapshots, orthogonal alignment (optionally with
self-learning), retrieval evaluation, and three spectral / metric-space
similarity measures over unaligned spaces.
"""

from .align import OrthogonalAligner, OrthogonalMap, apply_map, induce_dictionary, procrustes, self_learn, solve_procrustes
from .bli import BliReport, evaluate_mrr, retrieve
from .corpus import (
    DocCorpus,
    build_test_dict,
    frequency_bins,
    read_doc_alignment,
    read_doc_corpus,
    shuffle_sample,
    topic_adjusted_sample,
)
from .dictionaries import BilingualDictionary, CoverageReport, read_dictionary, write_dictionary
from .errors import (
    CoverageError,
    DivergenceError,
    DuplicateWordError,
    ParseError,
    UndefinedCorrelationError,
    UnreachableBudgetError,
    ZeroVectorError,
)
from .experiment import ExperimentConfig, run_experiment
from .isometry import bottleneck, evs, evs_from_spectra, gh, hausdorff, knn_graph, laplacian_spectrum, pearson, rips_diagram0, rsim
from .plotting import emit_plot
from .preprocess import (
    IterNormResult,
    VectorNormalizer,
    apply_chain,
    chain_label,
    iterative_normalize,
    l2_normalize,
    mean_center,
    parse_chain,
)
from .results import format_gap_table, gap_report, make_record, read_records, write_records
from .sgns import TrainConfig, TrainResult, Vocabulary, build_vocab, train
from .spaces import EmbeddingSpace, load_embeddings, save_embeddings

__version__ = "0.1.0"

__all__ = [
    "BilingualDictionary",
    "BliReport",
    "CoverageError",
    "CoverageReport",
    "DivergenceError",
    "DocCorpus",
    "DuplicateWordError",
    "EmbeddingSpace",
    "ExperimentConfig",
    "IterNormResult",
    "OrthogonalAligner",
    "OrthogonalMap",
    "ParseError",
    "TrainConfig",
    "TrainResult",
    "UndefinedCorrelationError",
    "UnreachableBudgetError",
    "VectorNormalizer",
    "Vocabulary",
    "ZeroVectorError",
    "apply_chain",
    "apply_map",
    "bottleneck",
    "build_test_dict",
    "build_vocab",
    "chain_label",
    "emit_plot",
    "evaluate_mrr",
    "evs",
    "evs_from_spectra",
    "format_gap_table",
    "frequency_bins",
    "gap_report",
    "gh",
    "hausdorff",
    "induce_dictionary",
    "iterative_normalize",
    "knn_graph",
    "l2_normalize",
    "laplacian_spectrum",
    "load_embeddings",
    "make_record",
    "mean_center",
    "parse_chain",
    "pearson",
    "procrustes",
    "read_dictionary",
    "read_doc_alignment",
    "read_doc_corpus",
    "read_records",
    "retrieve",
    "rips_diagram0",
    "rsim",
    "run_experiment",
    "save_embeddings",
    "self_learn",
    "shuffle_sample",
    "solve_procrustes",
    "topic_adjusted_sample",
    "train",
    "write_dictionary",
    "write_records",
]
