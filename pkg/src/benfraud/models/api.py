"""Training, prediction, evaluation, and the Benford ablation harness."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import SchemaError, TrainingError
from ..features import (
    FEATURE_COLUMNS,
    STATISTICAL_COLUMNS,
    FeatureVector,
    LabeledExample,
    design_matrix,
)
from .ensemble import AdaboostModel, RforestModel, fit_adaboost, fit_rforest
from .gbdt import GbdtModel, fit_gbdt
from .linear import LogregModel, fit_logreg
from .metrics import EvalReport, classification_report
from .split import SplitSpec, split
from .tree import (
    GiniTreeParams,
    TreeNode,
    fit_gini_tree,
    tree_predict,
    tree_predict_many,
)

MODEL_KINDS = ("logreg", "dtree", "adaboost", "rforest", "gbdt")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for every model kind, flat so config files stay flat."""

    seed: int = 0
    class_weight: str = "balanced"
    threshold: float = 0.5
    columns: tuple[str, ...] = FEATURE_COLUMNS
    min_samples_leaf: int = 1
    min_split_gain: float = 1e-12
    dtree_max_depth: int = 8
    gbdt_rounds: int = 300
    gbdt_learning_rate: float = 0.1
    gbdt_max_depth: int = 4
    gbdt_reg_lambda: float = 1.0
    gbdt_min_child_hess: float = 1e-6
    patience: int = 25
    adaboost_rounds: int = 100
    adaboost_depth: int = 2
    rforest_trees: int = 200
    rforest_max_depth: int = 12
    rforest_features: int | None = None
    logreg_l2: float = 1.0
    logreg_max_iter: int = 50
    logreg_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.class_weight not in ("balanced", "none"):
            raise ValueError(
                f"class_weight must be 'balanced' or 'none', got {self.class_weight!r}"
            )
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["columns"] = list(self.columns)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        kwargs = dict(data)
        if "columns" in kwargs:
            kwargs["columns"] = tuple(kwargs["columns"])
        return cls(**kwargs)


@dataclass
class DtreeModel:
    root: TreeNode
    gains: np.ndarray

    def predict_proba_one(self, x: np.ndarray) -> float:
        return tree_predict(self.root, x)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return tree_predict_many(self.root, X)


ModelParams = LogregModel | DtreeModel | AdaboostModel | RforestModel | GbdtModel


@dataclass
class TrainedModel:
    kind: str
    feature_schema: tuple[str, ...]
    train_config: TrainConfig
    params: ModelParams


def class_weights(y: np.ndarray, mode: str) -> np.ndarray:
    """Per-example weights; 'balanced' gives each class equal total mass.

    With weights n / (2 * n_class) the weights of both modes sum to n, so
    loss magnitudes stay comparable across the two settings.
    """
    if mode == "none":
        return np.ones(y.shape[0], dtype=np.float64)
    n = y.shape[0]
    n_pos = int(np.sum(y == 1))
    n_neg = n - n_pos
    w = np.where(y == 1, n / (2.0 * n_pos), n / (2.0 * n_neg))
    return w.astype(np.float64)


def _check_classes(y: np.ndarray, partition: str) -> None:
    if y.shape[0] == 0:
        raise TrainingError(f"{partition} partition is empty")
    if not np.any(y == 1):
        raise TrainingError(f"{partition} partition has no scam examples")
    if not np.any(y == -1):
        raise TrainingError(f"{partition} partition has no nonscam examples")


def train(
    kind: str,
    train_examples: Sequence[LabeledExample],
    valid_examples: Sequence[LabeledExample] | None = None,
    config: TrainConfig | None = None,
) -> TrainedModel:
    """Train one model kind on labeled feature vectors.

    Boosted kinds early-stop on the validation partition; when none is given
    they fall back to monitoring the training partition, which effectively
    disables stopping for gbdt (training loss keeps shrinking).
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    config = config or TrainConfig()
    columns = tuple(config.columns)
    X, y, _ = design_matrix(train_examples, columns)
    _check_classes(y, "training")
    w = class_weights(y, config.class_weight)

    if valid_examples:
        X_valid, y_valid, _ = design_matrix(valid_examples, columns)
        _check_classes(y_valid, "validation")
        w_valid = class_weights(y_valid, config.class_weight)
    else:
        X_valid, y_valid, w_valid = X, y, w

    params: ModelParams
    if kind == "logreg":
        params = fit_logreg(
            X,
            y,
            w,
            l2=config.logreg_l2,
            max_iter=config.logreg_max_iter,
            tol=config.logreg_tol,
        )
    elif kind == "dtree":
        gains = np.zeros(X.shape[1], dtype=np.float64)
        tree_params = GiniTreeParams(
            max_depth=config.dtree_max_depth,
            min_samples_leaf=config.min_samples_leaf,
            min_split_gain=config.min_split_gain,
        )
        wpos = np.where(y == 1, w, 0.0)
        wneg = np.where(y == -1, w, 0.0)
        root = fit_gini_tree(X, wpos, wneg, tree_params, gains)
        params = DtreeModel(root=root, gains=gains)
    elif kind == "adaboost":
        params = fit_adaboost(
            X,
            y,
            w,
            X_valid,
            y_valid,
            w_valid,
            rounds=config.adaboost_rounds,
            depth=config.adaboost_depth,
            min_samples_leaf=config.min_samples_leaf,
            min_split_gain=config.min_split_gain,
            patience=config.patience,
        )
    elif kind == "rforest":
        params = fit_rforest(
            X,
            y,
            w,
            n_trees=config.rforest_trees,
            max_depth=config.rforest_max_depth,
            min_samples_leaf=config.min_samples_leaf,
            min_split_gain=config.min_split_gain,
            features_per_split=config.rforest_features,
            seed=config.seed,
        )
    else:
        params = fit_gbdt(
            X,
            y,
            w,
            X_valid,
            y_valid,
            w_valid,
            rounds=config.gbdt_rounds,
            learning_rate=config.gbdt_learning_rate,
            max_depth=config.gbdt_max_depth,
            reg_lambda=config.gbdt_reg_lambda,
            min_samples_leaf=config.min_samples_leaf,
            min_child_hess=config.gbdt_min_child_hess,
            min_split_gain=config.min_split_gain,
            patience=config.patience,
        )
    return TrainedModel(
        kind=kind, feature_schema=columns, train_config=config, params=params
    )


def score_matrix(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Scores in [0, 1] for rows already ordered like the model's schema."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(model.feature_schema):
        raise SchemaError(
            f"expected {len(model.feature_schema)} feature columns, got shape {X.shape}"
        )
    return model.params.predict_proba(X)


def predict_matrix(model: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Labels (+1/-1) and scores; score >= threshold maps to +1."""
    scores = score_matrix(model, X)
    labels = np.where(scores >= model.train_config.threshold, 1, -1).astype(np.int64)
    return labels, scores


def predict_one(model: TrainedModel, features: FeatureVector) -> tuple[int, float]:
    row = np.array([features.get(name) for name in model.feature_schema])
    labels, scores = predict_matrix(model, row.reshape(1, -1))
    return int(labels[0]), float(scores[0])


def feature_importance(model: TrainedModel) -> tuple[tuple[str, float], ...]:
    """Normalized importances sorted by weight (ties by schema order).

    Tree kinds report accumulated split gain; logreg reports the magnitude
    of each standardized coefficient. When the model never split (or every
    coefficient is zero) the mass is spread uniformly.
    """
    if model.kind == "logreg":
        raw = np.abs(model.params.coef)
    else:
        raw = np.asarray(model.params.gains, dtype=np.float64)
    total = float(np.sum(raw))
    d = len(model.feature_schema)
    if total <= 0.0:
        weights = [1.0 / d] * d
    else:
        weights = [float(v) / total for v in raw]
    order = sorted(range(d), key=lambda i: (-weights[i], i))
    return tuple((model.feature_schema[i], weights[i]) for i in order)


def evaluate(model: TrainedModel, examples: Sequence[LabeledExample]) -> EvalReport:
    X, y, _ = design_matrix(examples, model.feature_schema)
    labels, _ = predict_matrix(model, X)
    return classification_report(y, labels, importances=feature_importance(model))


@dataclass
class ArmResult:
    kind: str
    columns: tuple[str, ...]
    model: TrainedModel
    report: EvalReport


@dataclass
class AblationResult:
    arms: dict[str, dict[str, ArmResult]] = field(default_factory=dict)
    n_train: int = 0
    n_valid: int = 0
    n_test: int = 0


ABLATION_ARMS = (
    ("without", STATISTICAL_COLUMNS),
    ("with", FEATURE_COLUMNS),
)


def run_ablation(
    examples: Sequence[LabeledExample],
    kinds: Sequence[str] = MODEL_KINDS,
    spec: SplitSpec | None = None,
    config: TrainConfig | None = None,
) -> AblationResult:
    """Train every kind twice, with and without the digit-law features.

    The split happens once, so both arms see identical partitions and the
    only difference between them is the feature set.
    """
    config = config or TrainConfig()
    spec = spec or SplitSpec(seed=config.seed)
    train_ex, valid_ex, test_ex = split(examples, spec)
    result = AblationResult(
        n_train=len(train_ex), n_valid=len(valid_ex), n_test=len(test_ex)
    )
    for arm_name, columns in ABLATION_ARMS:
        arm_config = dataclasses.replace(config, columns=columns)
        arm: dict[str, ArmResult] = {}
        for kind in kinds:
            model = train(kind, train_ex, valid_ex, arm_config)
            arm[kind] = ArmResult(
                kind=kind,
                columns=columns,
                model=model,
                report=evaluate(model, test_ex),
            )
        result.arms[arm_name] = arm
    return result
