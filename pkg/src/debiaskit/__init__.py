"""Subspace-projection debiasing for word embeddings.

Transforms pre-trained embeddings along bias directions built from
word-pair lists (group-specific lists or the group-agnostic
warmth/competence lists), and audits both residual bias and retained
embedding utility under a seeded randomized-trial protocol.
"""

__version__ = "0.1.0"

from .embedding_store import (
    EmbeddingMatrix,
    Neighbor,
    cosine,
    load_embeddings,
    nearest_neighbor,
    save_embeddings,
    unit_normalized,
)
from .errors import DataError, DebiasError, NumericError, UsageError, VocabularyError
from .subspace import (
    BiasDirection,
    WordPairSet,
    compute_bias_direction,
    load_pair_set,
    restrict_to_vocabulary,
    sample_pairs,
)
from .debias import (
    DebiasSpec,
    complement_neutral_tokens,
    hard_debias,
    linear_project,
    partial_project,
    run_pipeline,
    subtract,
)
from .bias_metrics import (
    ProfessionList,
    SynonymLexicon,
    ect,
    eqt,
    filter_professions,
    load_professions,
    spearman,
)
from .quality_bench import (
    AnalogyDataset,
    AnalogyResult,
    SimilarityDataset,
    SimilarityResult,
    analogy_accuracy,
    load_analogy_dataset,
    load_similarity_dataset,
    similarity_score,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    MethodCondition,
    MetricSeries,
    confidence_interval,
    emit_report,
    load_config,
    report_from_json,
    run_experiment,
)
from .resources import builtin_lexicon, builtin_pair_set, builtin_professions

__all__ = [
    "__version__",
    "AnalogyDataset",
    "AnalogyResult",
    "BiasDirection",
    "DataError",
    "DebiasError",
    "DebiasSpec",
    "EmbeddingMatrix",
    "ExperimentConfig",
    "ExperimentReport",
    "MethodCondition",
    "MetricSeries",
    "Neighbor",
    "NumericError",
    "ProfessionList",
    "SimilarityDataset",
    "SimilarityResult",
    "SynonymLexicon",
    "UsageError",
    "VocabularyError",
    "WordPairSet",
    "analogy_accuracy",
    "builtin_lexicon",
    "builtin_pair_set",
    "builtin_professions",
    "complement_neutral_tokens",
    "compute_bias_direction",
    "confidence_interval",
    "cosine",
    "ect",
    "emit_report",
    "eqt",
    "filter_professions",
    "hard_debias",
    "linear_project",
    "load_analogy_dataset",
    "load_config",
    "load_embeddings",
    "load_pair_set",
    "load_professions",
    "load_similarity_dataset",
    "nearest_neighbor",
    "partial_project",
    "report_from_json",
    "restrict_to_vocabulary",
    "run_experiment",
    "run_pipeline",
    "sample_pairs",
    "save_embeddings",
    "similarity_score",
    "spearman",
    "subtract",
    "unit_normalized",
]
