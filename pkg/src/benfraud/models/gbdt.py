"""Gradient-boosted trees with logistic loss and second-order splits.

Each round fits a regression tree to the gradient/hessian of the weighted
logistic loss; leaves carry -G/(H + lambda). Validation logloss drives early
stopping: after ``patience`` rounds without strict improvement, boosting
stops and the model is truncated to the best-scoring round (possibly zero
trees, leaving just the prior).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tree import GradTreeParams, TreeNode, fit_gradient_tree, tree_predict, tree_predict_many

__all__ = ["GbdtModel", "fit_gbdt"]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logloss(y01: np.ndarray, p: np.ndarray, w: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    terms = w * (y01 * np.log(p) + (1.0 - y01) * np.log1p(-p))
    return float(-np.sum(terms) / np.sum(w))


@dataclass
class GbdtModel:
    f0: float
    learning_rate: float
    trees: list[TreeNode]
    gains: np.ndarray
    valid_losses: list[float] = field(default_factory=list)
    best_round: int = 0

    def margins(self, X: np.ndarray) -> np.ndarray:
        z = np.full(X.shape[0], self.f0, dtype=np.float64)
        for tree in self.trees:
            z += self.learning_rate * tree_predict_many(tree, X)
        return z

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.margins(X))

    def predict_one(self, x: np.ndarray) -> float:
        z = self.f0
        for tree in self.trees:
            z += self.learning_rate * tree_predict(tree, x)
        return float(_sigmoid(np.array([z]))[0])


def fit_gbdt(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    X_valid: np.ndarray,
    y_valid: np.ndarray,
    w_valid: np.ndarray,
    *,
    rounds: int,
    learning_rate: float,
    max_depth: int,
    reg_lambda: float,
    min_samples_leaf: int,
    min_child_hess: float,
    min_split_gain: float,
    patience: int,
) -> GbdtModel:
    """Boost up to ``rounds`` trees, early-stopping on validation logloss."""
    y01 = (y + 1) / 2.0
    y01_valid = (y_valid + 1) / 2.0
    w_pos = float(np.sum(w[y == 1]))
    w_neg = float(np.sum(w[y == -1]))
    f0 = float(np.log(w_pos / w_neg))
    params = GradTreeParams(
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        reg_lambda=reg_lambda,
        min_child_hess=min_child_hess,
        min_split_gain=min_split_gain,
    )

    margin = np.full(X.shape[0], f0, dtype=np.float64)
    margin_valid = np.full(X_valid.shape[0], f0, dtype=np.float64)
    trees: list[TreeNode] = []
    per_tree_gains: list[np.ndarray] = []
    best_loss = _logloss(y01_valid, _sigmoid(margin_valid), w_valid)
    valid_losses = [best_loss]
    best_round = 0
    stale = 0

    for _ in range(rounds):
        p = _sigmoid(margin)
        grad = w * (p - y01)
        hess = w * (p * (1.0 - p))
        gains = np.zeros(X.shape[1], dtype=np.float64)
        tree = fit_gradient_tree(X, grad, hess, params, gains)
        trees.append(tree)
        per_tree_gains.append(gains)
        margin += learning_rate * tree_predict_many(tree, X)
        margin_valid += learning_rate * tree_predict_many(tree, X_valid)
        loss = _logloss(y01_valid, _sigmoid(margin_valid), w_valid)
        valid_losses.append(loss)
        if loss < best_loss:
            best_loss = loss
            best_round = len(trees)
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break

    kept = trees[:best_round]
    total_gains = np.zeros(X.shape[1], dtype=np.float64)
    for gains in per_tree_gains[:best_round]:
        total_gains += gains
    return GbdtModel(
        f0=f0,
        learning_rate=learning_rate,
        trees=kept,
        gains=total_gains,
        valid_losses=valid_losses,
        best_round=best_round,
    )
