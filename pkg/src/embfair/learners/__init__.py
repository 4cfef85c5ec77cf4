"""Featurization and the three from-scratch learners with CV tuning."""

from .features import FeatureVector, design_matrix, featurize
from .forest import ForestModel, train_forest
from .mlp import MLPModel, loss_and_grads, train_mlp
from .svm import SVMModel, kernel_matrix, kkt_residual, resolve_gamma, train_svm
from .tuning import (
    LEARNER_KINDS,
    HyperparamGrid,
    TrainedModel,
    child_seed,
    stratified_folds,
    tune,
)

__all__ = [
    "FeatureVector", "featurize", "design_matrix",
    "SVMModel", "train_svm", "kkt_residual", "kernel_matrix", "resolve_gamma",
    "ForestModel", "train_forest",
    "MLPModel", "train_mlp", "loss_and_grads",
    "HyperparamGrid", "TrainedModel", "tune", "stratified_folds",
    "child_seed", "LEARNER_KINDS",
]
