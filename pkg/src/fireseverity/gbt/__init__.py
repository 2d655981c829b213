"""From-scratch gradient-boosted regression trees."""

from .evaluate import Metrics, evaluate, kfold_cv, kfold_indices, mse, r2, train_test_split
from .model import GbtConfig, GbtModel, feature_importance, predict, train
from .serialize import dumps, load, loads, save
from .tree import Tree, build_tree

__all__ = [
    "GbtConfig",
    "GbtModel",
    "Metrics",
    "Tree",
    "build_tree",
    "dumps",
    "evaluate",
    "feature_importance",
    "kfold_cv",
    "kfold_indices",
    "load",
    "loads",
    "mse",
    "predict",
    "r2",
    "save",
    "train",
    "train_test_split",
]
