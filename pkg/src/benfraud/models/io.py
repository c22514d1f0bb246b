"""Model and report serialization plus the ablation comparison table."""

from __future__ import annotations

import json
from typing import IO, Sequence

import numpy as np

from ..errors import ModelFormatError
from ..ingest import _text_stream
from .api import (
    MODEL_KINDS,
    AblationResult,
    DtreeModel,
    TrainConfig,
    TrainedModel,
)
from .ensemble import AdaboostModel, RforestModel
from .gbdt import GbdtModel
from .linear import LogregModel
from .metrics import EvalReport
from .tree import node_from_dict, node_to_dict

MODEL_FORMAT = "benfraud-model"
MODEL_VERSION = 1

__all__ = [
    "MODEL_FORMAT",
    "MODEL_VERSION",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
    "save_report",
    "write_importances",
    "render_comparison",
]


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def _params_to_dict(model: TrainedModel) -> dict:
    p = model.params
    if model.kind == "logreg":
        return {
            "coef": _floats(p.coef),
            "intercept": p.intercept,
            "feature_medians": _floats(p.feature_medians),
            "feature_means": _floats(p.feature_means),
            "feature_stds": _floats(p.feature_stds),
            "converged": p.converged,
            "n_iter": p.n_iter,
        }
    if model.kind == "dtree":
        return {"root": node_to_dict(p.root), "gains": _floats(p.gains)}
    if model.kind == "adaboost":
        return {
            "trees": [node_to_dict(t) for t in p.trees],
            "alphas": _floats(p.alphas),
            "gains": _floats(p.gains),
            "valid_losses": _floats(p.valid_losses),
        }
    if model.kind == "rforest":
        return {
            "trees": [node_to_dict(t) for t in p.trees],
            "gains": _floats(p.gains),
            "oob_score": None if p.oob_score is None else float(p.oob_score),
        }
    return {
        "f0": p.f0,
        "learning_rate": p.learning_rate,
        "trees": [node_to_dict(t) for t in p.trees],
        "gains": _floats(p.gains),
        "valid_losses": _floats(p.valid_losses),
        "best_round": p.best_round,
    }


def _params_from_dict(kind: str, data: dict):
    if kind == "logreg":
        return LogregModel(
            coef=np.array(data["coef"], dtype=np.float64),
            intercept=float(data["intercept"]),
            feature_medians=np.array(data["feature_medians"], dtype=np.float64),
            feature_means=np.array(data["feature_means"], dtype=np.float64),
            feature_stds=np.array(data["feature_stds"], dtype=np.float64),
            converged=bool(data["converged"]),
            n_iter=int(data["n_iter"]),
        )
    if kind == "dtree":
        return DtreeModel(
            root=node_from_dict(data["root"]),
            gains=np.array(data["gains"], dtype=np.float64),
        )
    if kind == "adaboost":
        return AdaboostModel(
            trees=[node_from_dict(t) for t in data["trees"]],
            alphas=[float(a) for a in data["alphas"]],
            gains=np.array(data["gains"], dtype=np.float64),
            valid_losses=[float(v) for v in data["valid_losses"]],
        )
    if kind == "rforest":
        oob = data["oob_score"]
        return RforestModel(
            trees=[node_from_dict(t) for t in data["trees"]],
            gains=np.array(data["gains"], dtype=np.float64),
            oob_score=None if oob is None else float(oob),
        )
    return GbdtModel(
        f0=float(data["f0"]),
        learning_rate=float(data["learning_rate"]),
        trees=[node_from_dict(t) for t in data["trees"]],
        gains=np.array(data["gains"], dtype=np.float64),
        valid_losses=[float(v) for v in data["valid_losses"]],
        best_round=int(data["best_round"]),
    )


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "feature_schema": list(model.feature_schema),
        "train_config": model.train_config.as_dict(),
        "params": _params_to_dict(model),
    }


def model_from_dict(data: dict) -> TrainedModel:
    if not isinstance(data, dict):
        raise ModelFormatError("model file does not hold a JSON object")
    if data.get("format") != MODEL_FORMAT:
        raise ModelFormatError(
            f"unrecognized model format {data.get('format')!r}; expected {MODEL_FORMAT!r}"
        )
    version = data.get("version")
    if version != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {version!r}; this build reads version {MODEL_VERSION}"
        )
    kind = data.get("kind")
    if kind not in MODEL_KINDS:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    try:
        schema = tuple(str(c) for c in data["feature_schema"])
        config = TrainConfig.from_dict(data["train_config"])
        params = _params_from_dict(kind, data["params"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from exc
    return TrainedModel(
        kind=kind, feature_schema=schema, train_config=config, params=params
    )


def save_model(model: TrainedModel, stream: IO) -> None:
    """Write the versioned self-describing JSON form.

    json emits floats via repr, so reloading reproduces every learned
    parameter bit for bit and therefore every prediction.
    """
    with _text_stream(stream) as text:
        json.dump(model_to_dict(model), text, sort_keys=True, indent=2)
        text.write("\n")


def load_model(stream: IO) -> TrainedModel:
    with _text_stream(stream) as text:
        try:
            data = json.load(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(data)


def save_report(report: EvalReport, stream: IO) -> None:
    with _text_stream(stream) as text:
        json.dump(report.as_dict(), text, sort_keys=True, indent=2)
        text.write("\n")


def write_importances(
    importances: Sequence[tuple[str, float]], stream: IO
) -> None:
    """CSV of ranked feature importances (feature,weight)."""
    with _text_stream(stream) as text:
        text.write("feature,weight\n")
        for name, weight in importances:
            text.write(f"{name},{weight!r}\n")


_METRIC_ROWS = (
    ("precision(+1)", lambda r: r.pos.precision),
    ("recall(+1)", lambda r: r.pos.recall),
    ("f1(+1)", lambda r: r.pos.f1),
    ("precision(-1)", lambda r: r.neg.precision),
    ("recall(-1)", lambda r: r.neg.recall),
    ("f1(-1)", lambda r: r.neg.f1),
    ("macro_precision", lambda r: r.macro_precision),
    ("macro_recall", lambda r: r.macro_recall),
    ("macro_f1", lambda r: r.macro_f1),
    ("balanced_accuracy", lambda r: r.balanced_accuracy),
    ("accuracy", lambda r: r.accuracy),
)

_ARM_TITLES = {
    "without": "Without Benford features",
    "with": "With Benford features",
}


def render_comparison(result: AblationResult) -> str:
    """Text table: metric rows, model-kind columns, one block per arm."""
    lines = [
        "Classifier comparison",
        "=====================",
        f"partitions: train={result.n_train} valid={result.n_valid} test={result.n_test}",
        "",
    ]
    label_width = max(len(name) for name, _ in _METRIC_ROWS)
    for arm_name, arm in result.arms.items():
        kinds = [k for k in MODEL_KINDS if k in arm]
        kinds += [k for k in arm if k not in MODEL_KINDS]
        title = _ARM_TITLES.get(arm_name, arm_name)
        subtitle = f"{title} ({len(next(iter(arm.values())).columns)} columns)"
        lines.append(subtitle)
        lines.append("-" * len(subtitle))
        header = " ".join([" " * label_width] + [f"{k:>10}" for k in kinds])
        lines.append(header)
        for name, getter in _METRIC_ROWS:
            cells = [f"{getter(arm[k].report):>10.4f}" for k in kinds]
            lines.append(" ".join([f"{name:<{label_width}}"] + cells))
        lines.append("")
    return "\n".join(lines)
