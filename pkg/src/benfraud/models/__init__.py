"""Classifier bench: five model kinds, split protocol, metrics, ablation."""

from .api import (
    ABLATION_ARMS,
    MODEL_KINDS,
    AblationResult,
    ArmResult,
    DtreeModel,
    TrainConfig,
    TrainedModel,
    class_weights,
    evaluate,
    feature_importance,
    predict_matrix,
    predict_one,
    run_ablation,
    score_matrix,
    train,
)
from .ensemble import AdaboostModel, RforestModel, fit_adaboost, fit_rforest
from .gbdt import GbdtModel, fit_gbdt
from .io import (
    MODEL_FORMAT,
    MODEL_VERSION,
    load_model,
    model_from_dict,
    model_to_dict,
    render_comparison,
    save_model,
    save_report,
    write_importances,
)
from .linear import LogregModel, fit_logreg
from .metrics import (
    ClassMetrics,
    Confusion,
    EvalReport,
    classification_report,
    confusion_matrix,
)
from .split import SplitSpec, split
from .tree import (
    GiniTreeParams,
    GradTreeParams,
    TreeNode,
    fit_gini_tree,
    fit_gradient_tree,
    node_from_dict,
    node_to_dict,
    tree_depth,
    tree_predict,
    tree_predict_many,
)

__all__ = [
    "ABLATION_ARMS",
    "MODEL_KINDS",
    "MODEL_FORMAT",
    "MODEL_VERSION",
    "AblationResult",
    "AdaboostModel",
    "ArmResult",
    "ClassMetrics",
    "Confusion",
    "DtreeModel",
    "EvalReport",
    "GbdtModel",
    "GiniTreeParams",
    "GradTreeParams",
    "LogregModel",
    "RforestModel",
    "SplitSpec",
    "TrainConfig",
    "TrainedModel",
    "TreeNode",
    "class_weights",
    "classification_report",
    "confusion_matrix",
    "evaluate",
    "feature_importance",
    "fit_adaboost",
    "fit_gbdt",
    "fit_gini_tree",
    "fit_gradient_tree",
    "fit_logreg",
    "fit_rforest",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "node_from_dict",
    "node_to_dict",
    "predict_matrix",
    "predict_one",
    "render_comparison",
    "run_ablation",
    "save_model",
    "save_report",
    "score_matrix",
    "split",
    "train",
    "tree_depth",
    "tree_predict",
    "tree_predict_many",
]
