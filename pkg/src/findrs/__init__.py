"""Bottom-up monotone-DNF rule learning for categorical data.

Public surface: the three estimators, the functional core they wrap, and the
dataset pipeline (manifests, discretization, encodings, splits).
"""

from .dataset import (
    Attribute,
    DataError,
    Dataset,
    RawTable,
    SplitSpec,
    binarize_labels,
    discretize,
    encode,
    load_csv,
    load_manifest,
    most_frequent_class,
    split,
)
from .ensemble import (
    FindRSBayesPointClassifier,
    FindRSVoteClassifier,
    VoteEnsemble,
    WeightedRuleSet,
    aggregate_bp,
    fit_ensemble,
    predict_bo,
    predict_bp,
    prune_top_k,
    select_k_by_training_accuracy,
)
from .evaluation import (
    ExperimentConfig,
    Report,
    accuracy,
    f1,
    prune_curve,
    run_experiment,
    version_space_oracle,
)
from .learner import (
    FindRSClassifier,
    FitReport,
    InternalInvariantError,
    LearnerState,
    check_prop1,
    fit_rules,
    prune,
)
from .rules import (
    ANY,
    covers,
    covers_set,
    generalize,
    hypothesis_space_size,
    more_general,
)

__version__ = "0.1.0"

__all__ = [
    "ANY",
    "Attribute",
    "DataError",
    "Dataset",
    "ExperimentConfig",
    "FindRSBayesPointClassifier",
    "FindRSClassifier",
    "FindRSVoteClassifier",
    "FitReport",
    "InternalInvariantError",
    "LearnerState",
    "RawTable",
    "Report",
    "SplitSpec",
    "VoteEnsemble",
    "WeightedRuleSet",
    "accuracy",
    "aggregate_bp",
    "binarize_labels",
    "check_prop1",
    "covers",
    "covers_set",
    "discretize",
    "encode",
    "f1",
    "fit_ensemble",
    "fit_rules",
    "generalize",
    "hypothesis_space_size",
    "load_csv",
    "load_manifest",
    "more_general",
    "most_frequent_class",
    "predict_bo",
    "predict_bp",
    "prune",
    "prune_curve",
    "prune_top_k",
    "run_experiment",
    "select_k_by_training_accuracy",
    "split",
    "version_space_oracle",
]
