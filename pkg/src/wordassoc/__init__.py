"""Corpus statistics toolkit: significance-aware word association measures
and an evaluation harness against human-ranked word-pair datasets."""

from .cooccurrence import (
    PairDocProfile,
    PairOccurrence,
    PairStatistics,
    enumerate_pair_occurrences,
    load_pairs,
    max_nonoverlapped,
    pair_profile,
    pair_statistics,
)
from .corpus import CorpusIndex, Vocabulary, build_index, read_corpus, tokenize
from .errors import DataFormatError, UnsupportedPairError, WordAssocError
from .evaluation import (
    CrossValidationResult,
    EvalReport,
    FoldResult,
    GoldDataset,
    GoldEntry,
    GridPoint,
    GridSpec,
    PairScorer,
    average_deviation,
    cross_validate,
    evaluate,
    grid_search,
    load_gold,
    spearman,
)
from .measures import (
    ALL_MEASURES,
    ContingencyTable,
    MeasureConfig,
    MeasureId,
    ScoreResult,
    penalized_expectation,
    score,
    score_from_stats,
)
from .significance import (
    NullModelConfig,
    PiKey,
    PiProvenance,
    PiTable,
    build_pi_table,
    compute_z,
    epsilon_significant,
    expected_z,
    load_pi_table,
    pi,
    pi_exact,
    pi_monte_carlo,
    save_pi_table,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_MEASURES",
    "ContingencyTable",
    "CorpusIndex",
    "CrossValidationResult",
    "DataFormatError",
    "EvalReport",
    "FoldResult",
    "GoldDataset",
    "GoldEntry",
    "GridPoint",
    "GridSpec",
    "MeasureConfig",
    "MeasureId",
    "NullModelConfig",
    "PairDocProfile",
    "PairOccurrence",
    "PairScorer",
    "PairStatistics",
    "PiKey",
    "PiProvenance",
    "PiTable",
    "ScoreResult",
    "UnsupportedPairError",
    "Vocabulary",
    "WordAssocError",
    "average_deviation",
    "build_index",
    "build_pi_table",
    "compute_z",
    "cross_validate",
    "enumerate_pair_occurrences",
    "epsilon_significant",
    "evaluate",
    "expected_z",
    "grid_search",
    "load_gold",
    "load_pairs",
    "load_pi_table",
    "max_nonoverlapped",
    "pair_profile",
    "pair_statistics",
    "penalized_expectation",
    "pi",
    "pi_exact",
    "pi_monte_carlo",
    "read_corpus",
    "save_pi_table",
    "score",
    "score_from_stats",
    "spearman",
    "tokenize",
    "__version__",
]
