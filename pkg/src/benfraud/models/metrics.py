"""Classification metrics for imbalanced binary evaluation.

The positive class is +1 (scam). Per-class precision/recall/F1 are reported
alongside their macro averages; balanced accuracy is the macro average of
recall, which is how the headline "macro avg accuracy" figure is read.
Undefined ratios (zero denominators) are reported as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = ["ClassMetrics", "Confusion", "EvalReport", "confusion_matrix", "classification_report"]


@dataclass(frozen=True)
class Confusion:
    """Binary confusion counts with +1 as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self) -> dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    pos: ClassMetrics
    neg: ClassMetrics
    macro_precision: float
    macro_recall: float
    macro_f1: float
    balanced_accuracy: float
    accuracy: float
    confusion: Confusion
    importances: tuple[tuple[str, float], ...] = ()

    def as_dict(self) -> dict:
        return {
            "per_class": {
                "+1": vars(self.pos).copy(),
                "-1": vars(self.neg).copy(),
            },
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "balanced_accuracy": self.balanced_accuracy,
            "accuracy": self.accuracy,
            "confusion": self.confusion.as_dict(),
            "importances": [[name, weight] for name, weight in self.importances],
        }


def confusion_matrix(y_true: Sequence[int], y_pred: Sequence[int]) -> Confusion:
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred lengths differ")
    tp = fp = fn = tn = 0
    for truth, pred in zip(y_true, y_pred):
        if truth not in (1, -1) or pred not in (1, -1):
            raise ValueError("labels must be +1 or -1")
        if pred == 1:
            if truth == 1:
                tp += 1
            else:
                fp += 1
        else:
            if truth == 1:
                fn += 1
            else:
                tn += 1
    return Confusion(tp=tp, fp=fp, fn=fn, tn=tn)


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def _f1(precision: float, recall: float) -> float:
    return _ratio(2 * precision * recall, precision + recall)


def classification_report(
    y_true: Sequence[int],
    y_pred: Sequence[int],
    importances: Sequence[tuple[str, float]] = (),
) -> EvalReport:
    """Full report from parallel truth/prediction label sequences."""
    c = confusion_matrix(y_true, y_pred)
    precision_pos = _ratio(c.tp, c.tp + c.fp)
    recall_pos = _ratio(c.tp, c.tp + c.fn)
    precision_neg = _ratio(c.tn, c.tn + c.fn)
    recall_neg = _ratio(c.tn, c.tn + c.fp)
    pos = ClassMetrics(
        precision=precision_pos,
        recall=recall_pos,
        f1=_f1(precision_pos, recall_pos),
        support=c.tp + c.fn,
    )
    neg = ClassMetrics(
        precision=precision_neg,
        recall=recall_neg,
        f1=_f1(precision_neg, recall_neg),
        support=c.tn + c.fp,
    )
    return EvalReport(
        pos=pos,
        neg=neg,
        macro_precision=(pos.precision + neg.precision) / 2,
        macro_recall=(pos.recall + neg.recall) / 2,
        macro_f1=(pos.f1 + neg.f1) / 2,
        balanced_accuracy=(pos.recall + neg.recall) / 2,
        accuracy=_ratio(c.tp + c.tn, c.total),
        confusion=c,
        importances=tuple(importances),
    )
