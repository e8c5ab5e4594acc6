"""smudge: measure how dirty-training-data metrics diverge from clean-test truth.

Injects controlled, industry-style noise (truncation, irrelevant-text
interspersal, label flips, conflicting replicas) into labeled text corpora,
trains linear classifiers from scratch, and reports the divergence between
dirty-set cross-validation and clean held-out accuracy across noise levels.
"""

from .__about__ import __version__
from .corpus import (
    Dataset,
    Document,
    SplitSpec,
    build_synthetic,
    load_dataset,
    save_dataset,
    split_train_test,
    subsample,
)
from .evaluation import (
    FoldAssignment,
    SweepReport,
    cross_validate,
    kfold,
    regression_slope,
    relative_gain,
    secant_slope,
    sweep,
)
from .models import ClassifierSpec, TrainedModel, evaluate, load_model, predict, save_model, train
from .noise import NoisePlan, apply_noise, flip_labels, intersperse_doc, replicate_conflict, select_fraction, truncate_doc
from .text import Vocabulary, build_vocabulary, tokenize, vectorize_bow

__all__ = [
    "__version__",
    "Dataset",
    "Document",
    "SplitSpec",
    "load_dataset",
    "save_dataset",
    "split_train_test",
    "build_synthetic",
    "subsample",
    "tokenize",
    "Vocabulary",
    "build_vocabulary",
    "vectorize_bow",
    "NoisePlan",
    "select_fraction",
    "truncate_doc",
    "intersperse_doc",
    "flip_labels",
    "replicate_conflict",
    "apply_noise",
    "ClassifierSpec",
    "TrainedModel",
    "train",
    "predict",
    "evaluate",
    "save_model",
    "load_model",
    "FoldAssignment",
    "kfold",
    "cross_validate",
    "secant_slope",
    "regression_slope",
    "relative_gain",
    "sweep",
    "SweepReport",
]
