"""embfair: gender-bias auditing for word embeddings and the classifiers
built on top of them.

The library measures embedding bias for a target category (mean absolute
cosine against a PCA-derived gender direction), transforms labeled note
corpora (pronoun swapping, neutralization, counterfactual augmentation),
trains three from-scratch learners, and reports per-gender-group false
negative rates, FNRR, and swapped-pair mismatch counts across the four
experimental conditions.
"""

__version__ = "0.1.0"

from .corpus import (
    CONDITIONS,
    CorpusFormatError,
    LabeledNote,
    SwapRules,
    build_condition,
    build_paired_testset,
    detokenize,
    load_corpus,
    load_swap_rules,
    neutralize,
    save_corpus,
    swap_gender,
    tokenize,
)
from .embeddings import (
    EmbeddingTable,
    PhraseResolution,
    VectorFileError,
    load_vectors,
    resolve,
    write_tsv,
)
from .fairness import (
    FairnessReport,
    GroupConfusion,
    MatrixResult,
    fnrr,
    mismatch_count,
    protocol_split,
    render_markdown,
    report_matrix,
    run_experiment,
)
from .geometry import (
    BiasScore,
    GenderDirection,
    GenderPair,
    GeometryError,
    default_gender_pairs,
    default_target_terms,
    direct_bias,
    gender_direction,
    load_gender_pairs,
    load_terms,
    spectrum_report,
    write_spectrum_csv,
)
from .learners import (
    FeatureVector,
    HyperparamGrid,
    TrainedModel,
    design_matrix,
    featurize,
    train_forest,
    train_mlp,
    train_svm,
    tune,
)

__all__ = [
    "EmbeddingTable", "PhraseResolution", "VectorFileError",
    "load_vectors", "write_tsv", "resolve",
    "GenderPair", "GenderDirection", "BiasScore", "GeometryError",
    "gender_direction", "direct_bias", "spectrum_report", "write_spectrum_csv",
    "load_gender_pairs", "load_terms", "default_gender_pairs", "default_target_terms",
    "LabeledNote", "SwapRules", "CorpusFormatError", "CONDITIONS",
    "tokenize", "detokenize", "swap_gender", "neutralize",
    "build_condition", "build_paired_testset",
    "load_corpus", "save_corpus", "load_swap_rules",
    "FeatureVector", "featurize", "design_matrix",
    "HyperparamGrid", "TrainedModel", "tune",
    "train_svm", "train_forest", "train_mlp",
    "GroupConfusion", "FairnessReport", "MatrixResult",
    "fnrr", "mismatch_count", "protocol_split",
    "run_experiment", "report_matrix", "render_markdown",
]
