"""AdaBoost (SAMME) and random forest over the shared gini trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..seeds import RFOREST, component_rng
from .tree import GiniTreeParams, TreeNode, fit_gini_tree, tree_predict, tree_predict_many

__all__ = ["AdaboostModel", "RforestModel", "fit_adaboost", "fit_rforest"]

_ERR_FLOOR = 1e-10


def _sigmoid_scalar(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@dataclass
class AdaboostModel:
    trees: list[TreeNode]
    alphas: list[float]
    gains: np.ndarray
    valid_losses: list[float] = field(default_factory=list)

    def margin_one(self, x: np.ndarray) -> float:
        margin = 0.0
        for tree, alpha in zip(self.trees, self.alphas):
            vote = 1.0 if tree_predict(tree, x) >= 0.5 else -1.0
            margin += alpha * vote
        return margin

    def predict_proba_one(self, x: np.ndarray) -> float:
        # Sigmoid of the signed vote margin: monotone in the SAMME decision
        # rule (score >= 0.5 iff the weighted vote is positive) but smooth,
        # so validation logloss is informative from the first round.
        return _sigmoid_scalar(self.margin_one(x))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_proba_one(X[i]) for i in range(X.shape[0])])


def _score_logloss(y01: np.ndarray, score: np.ndarray, w: np.ndarray) -> float:
    p = np.clip(score, 1e-12, 1.0 - 1e-12)
    terms = w * (y01 * np.log(p) + (1.0 - y01) * np.log1p(-p))
    return float(-np.sum(terms) / np.sum(w))


def fit_adaboost(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    X_valid: np.ndarray,
    y_valid: np.ndarray,
    w_valid: np.ndarray,
    *,
    rounds: int,
    depth: int,
    min_samples_leaf: int,
    min_split_gain: float,
    patience: int,
) -> AdaboostModel:
    """Discrete SAMME boosting of depth-limited gini trees.

    For two classes the SAMME multiclass term ln(K-1) vanishes, leaving the
    classic alpha = ln((1 - err) / err). The prediction score is the sigmoid
    of the signed vote margin, and validation logloss on that score drives
    early stopping, truncating to the best prefix of rounds. Boosting also
    stops when a round's weighted error reaches 0 (alpha capped) or 0.5 (no
    better than chance).
    """
    params = GiniTreeParams(
        max_depth=depth, min_samples_leaf=min_samples_leaf, min_split_gain=min_split_gain
    )
    y01_valid = (y_valid + 1) / 2.0
    weights = w / np.sum(w)
    trees: list[TreeNode] = []
    alphas: list[float] = []
    per_tree_gains: list[np.ndarray] = []

    margins = np.zeros(X_valid.shape[0], dtype=np.float64)
    best_loss = _score_logloss(y01_valid, np.full(X_valid.shape[0], 0.5), w_valid)
    valid_losses = [best_loss]
    best_round = 0
    stale = 0

    for _round in range(rounds):
        gains = np.zeros(X.shape[1], dtype=np.float64)
        wpos = np.where(y == 1, weights, 0.0)
        wneg = np.where(y == -1, weights, 0.0)
        tree = fit_gini_tree(X, wpos, wneg, params, gains)
        pred = np.where(tree_predict_many(tree, X) >= 0.5, 1, -1)
        missed = pred != y
        err = float(np.sum(weights[missed]))
        if err >= 0.5:
            break
        err = max(err, _ERR_FLOOR)
        alpha = math.log((1.0 - err) / err)
        trees.append(tree)
        alphas.append(alpha)
        per_tree_gains.append(gains)

        valid_vote = np.where(tree_predict_many(tree, X_valid) >= 0.5, 1.0, -1.0)
        margins += alpha * valid_vote
        proba = 1.0 / (1.0 + np.exp(-margins))
        loss = _score_logloss(y01_valid, proba, w_valid)
        valid_losses.append(loss)
        if loss < best_loss:
            best_loss = loss
            best_round = len(trees)
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break
        if err <= _ERR_FLOOR:
            break
        weights = weights * np.exp(alpha * missed)
        weights = weights / np.sum(weights)

    total_gains = np.zeros(X.shape[1], dtype=np.float64)
    for gains in per_tree_gains[:best_round]:
        total_gains += gains
    return AdaboostModel(
        trees=trees[:best_round],
        alphas=alphas[:best_round],
        gains=total_gains,
        valid_losses=valid_losses,
    )


@dataclass
class RforestModel:
    trees: list[TreeNode]
    gains: np.ndarray
    oob_score: float | None = None

    def predict_proba_one(self, x: np.ndarray) -> float:
        return float(np.mean([tree_predict(tree, x) for tree in self.trees]))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_proba_one(X[i]) for i in range(X.shape[0])])


def fit_rforest(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    *,
    n_trees: int,
    max_depth: int,
    min_samples_leaf: int,
    min_split_gain: float,
    features_per_split: int | None,
    seed: int,
) -> RforestModel:
    """Bootstrap forest of gini trees with per-split feature subsampling.

    Each tree draws its bootstrap and split features from a generator keyed
    by (seed, tree index), so trees are independent of build order. The
    out-of-bag accuracy is informational only.
    """
    n, d = X.shape
    params = GiniTreeParams(
        max_depth=max_depth, min_samples_leaf=min_samples_leaf, min_split_gain=min_split_gain
    )
    if features_per_split is None:
        features_per_split = max(1, int(math.isqrt(d)))
    trees: list[TreeNode] = []
    total_gains = np.zeros(d, dtype=np.float64)
    oob_prob_sum = np.zeros(n, dtype=np.float64)
    oob_counts = np.zeros(n, dtype=np.int64)

    for t in range(n_trees):
        rng = component_rng(seed, RFOREST, t)
        boot = rng.integers(0, n, size=n)
        Xb = X[boot]
        yb = y[boot]
        wb = w[boot]
        wpos = np.where(yb == 1, wb, 0.0)
        wneg = np.where(yb == -1, wb, 0.0)
        gains = np.zeros(d, dtype=np.float64)
        tree = fit_gini_tree(
            Xb, wpos, wneg, params, gains, rng=rng, features_per_split=features_per_split
        )
        trees.append(tree)
        total_gains += gains
        out_of_bag = np.setdiff1d(np.arange(n), boot, assume_unique=False)
        if out_of_bag.size:
            oob_prob_sum[out_of_bag] += tree_predict_many(tree, X[out_of_bag])
            oob_counts[out_of_bag] += 1

    covered = oob_counts > 0
    if covered.any():
        oob_pred = np.where(oob_prob_sum[covered] / oob_counts[covered] >= 0.5, 1, -1)
        oob_score = float(np.mean(oob_pred == y[covered]))
    else:
        oob_score = None
    return RforestModel(trees=trees, gains=total_gains, oob_score=oob_score)
