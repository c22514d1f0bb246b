"""Decision tree construction shared by all tree-based models.

Trees are grown by exact greedy scans (see the kernels package). Split
thresholds are anchored at observed feature values and route x <= threshold
left, which makes predictions invariant under any strictly monotone
transform applied consistently to a column. Missing values follow a learned
default branch: both routings are scored and the better one wins; at nodes
with no missing samples the default points at the heavier child, so an
all-missing vector at predict time falls through to the model's prior
direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..kernels import scan_gini_splits, scan_grad_splits

__all__ = [
    "TreeNode",
    "GradTreeParams",
    "GiniTreeParams",
    "fit_gradient_tree",
    "fit_gini_tree",
    "tree_predict",
    "tree_predict_many",
    "node_to_dict",
    "node_from_dict",
    "tree_depth",
    "leaf_count",
]


@dataclass
class TreeNode:
    """Internal node (left/right set) or leaf (value set)."""

    feature: int = -1
    threshold: float = 0.0
    default_left: bool = True
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class GradTreeParams:
    max_depth: int
    min_samples_leaf: int
    reg_lambda: float
    min_child_hess: float
    min_split_gain: float


@dataclass(frozen=True)
class GiniTreeParams:
    max_depth: int
    min_samples_leaf: int
    min_split_gain: float


@dataclass(frozen=True)
class _Candidate:
    score: float
    feature: int
    threshold: float
    default_left: bool
    had_missing: bool


def _best_candidate(
    X: np.ndarray,
    idx: np.ndarray,
    features: np.ndarray,
    scan: Callable,
    present_stats: Callable[[np.ndarray], tuple],
    missing_stats: Callable[[np.ndarray], tuple],
) -> _Candidate | None:
    """Scan the given features at one node; returns the best valid split.

    ``present_stats(rows)`` yields the per-sample arrays the kernel needs;
    ``missing_stats(rows)`` yields the aggregate missing-mass scalars.
    Features are visited in ascending order and replaced only on a strictly
    greater score, so ties resolve to the lowest feature index.
    """
    best: _Candidate | None = None
    for f in features:
        col = X[idx, f]
        miss_mask = np.isnan(col)
        present = idx[~miss_mask]
        if present.shape[0] < 2:
            continue
        col_present = col[~miss_mask]
        order = np.argsort(col_present, kind="stable")
        values = np.ascontiguousarray(col_present[order])
        miss_rows = idx[miss_mask]
        n_miss = int(miss_rows.shape[0])
        score, pos, default_left = scan(
            values,
            *present_stats(present[order]),
            *missing_stats(miss_rows),
            n_miss,
        )
        if pos >= 0 and (best is None or score > best.score):
            best = _Candidate(
                score=score,
                feature=int(f),
                threshold=float(values[pos]),
                default_left=default_left,
                had_missing=n_miss > 0,
            )
    return best


def fit_gradient_tree(
    X: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    params: GradTreeParams,
    gain_out: np.ndarray,
) -> TreeNode:
    """Fit one second-order regression tree on (grad, hess).

    Leaf values are raw weights -G/(H + lambda); the caller applies its
    learning rate. Split gains accumulate into ``gain_out`` per feature.
    """
    lam = params.reg_lambda
    all_features = np.arange(X.shape[1])

    def leaf(idx: np.ndarray) -> TreeNode:
        g = float(np.sum(grad[idx]))
        h = float(np.sum(hess[idx]))
        return TreeNode(value=-g / (h + lam))

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        if depth >= params.max_depth or idx.shape[0] < 2 * params.min_samples_leaf:
            return leaf(idx)
        candidate = _best_candidate(
            X,
            idx,
            all_features,
            lambda v, gp, hp, gm, hm, nm: scan_grad_splits(
                v, gp, hp, gm, hm, nm, lam, params.min_samples_leaf, params.min_child_hess
            ),
            lambda rows: (
                np.ascontiguousarray(grad[rows]),
                np.ascontiguousarray(hess[rows]),
            ),
            lambda rows: (float(np.sum(grad[rows])), float(np.sum(hess[rows]))),
        )
        if candidate is None:
            return leaf(idx)
        g = float(np.sum(grad[idx]))
        h = float(np.sum(hess[idx]))
        parent_score = (g * g) / (h + lam)
        gain = candidate.score - parent_score
        if gain <= params.min_split_gain:
            return leaf(idx)
        left_idx, right_idx, default_left = _route(
            X, idx, candidate, hess, params_weighting="hess"
        )
        gain_out[candidate.feature] += gain
        node = TreeNode(
            feature=candidate.feature,
            threshold=candidate.threshold,
            default_left=default_left,
        )
        node.left = build(left_idx, depth + 1)
        node.right = build(right_idx, depth + 1)
        return node

    return build(np.arange(X.shape[0]), 0)


def fit_gini_tree(
    X: np.ndarray,
    wpos: np.ndarray,
    wneg: np.ndarray,
    params: GiniTreeParams,
    gain_out: np.ndarray,
    rng: np.random.Generator | None = None,
    features_per_split: int | None = None,
) -> TreeNode:
    """Fit one weighted-gini classification tree.

    Leaf values are the weighted positive-class probability. When
    ``features_per_split`` is set, each split draws that many candidate
    features without replacement from ``rng`` (random-forest style).
    """
    n_features = X.shape[1]
    all_features = np.arange(n_features)
    weight = wpos + wneg

    def leaf(idx: np.ndarray) -> TreeNode:
        wp = float(np.sum(wpos[idx]))
        wn = float(np.sum(wneg[idx]))
        total = wp + wn
        return TreeNode(value=wp / total if total > 0 else 0.5)

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        wp = float(np.sum(wpos[idx]))
        wn = float(np.sum(wneg[idx]))
        if (
            depth >= params.max_depth
            or idx.shape[0] < 2 * params.min_samples_leaf
            or wp == 0.0
            or wn == 0.0
        ):
            return leaf(idx)
        if features_per_split is not None and features_per_split < n_features:
            chosen = rng.choice(n_features, size=features_per_split, replace=False)
            features = np.sort(chosen)
        else:
            features = all_features
        candidate = _best_candidate(
            X,
            idx,
            features,
            lambda v, wp_s, wn_s, wpm, wnm, nm: scan_gini_splits(
                v, wp_s, wn_s, wpm, wnm, nm, params.min_samples_leaf
            ),
            lambda rows: (
                np.ascontiguousarray(wpos[rows]),
                np.ascontiguousarray(wneg[rows]),
            ),
            lambda rows: (float(np.sum(wpos[rows])), float(np.sum(wneg[rows]))),
        )
        if candidate is None:
            return leaf(idx)
        total = wp + wn
        parent_score = (wp * wp + wn * wn) / total
        gain = candidate.score - parent_score
        if gain <= params.min_split_gain:
            return leaf(idx)
        left_idx, right_idx, default_left = _route(
            X, idx, candidate, weight, params_weighting="weight"
        )
        gain_out[candidate.feature] += gain
        node = TreeNode(
            feature=candidate.feature,
            threshold=candidate.threshold,
            default_left=default_left,
        )
        node.left = build(left_idx, depth + 1)
        node.right = build(right_idx, depth + 1)
        return node

    return build(np.arange(X.shape[0]), 0)


def _route(
    X: np.ndarray,
    idx: np.ndarray,
    candidate: _Candidate,
    mass: np.ndarray,
    params_weighting: str,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Partition node samples by the candidate split.

    When the node saw no missing values for the split feature, the learned
    default is meaningless, so it is re-pointed at the child carrying more
    mass (hessian or weight) - the "prior direction" for future missing data.
    """
    col = X[idx, candidate.feature]
    miss = np.isnan(col)
    go_left = col <= candidate.threshold
    default_left = candidate.default_left
    if candidate.had_missing:
        go_left = go_left | (miss & default_left)
    left_idx = idx[go_left]
    right_idx = idx[~go_left]
    if not candidate.had_missing:
        left_mass = float(np.sum(mass[left_idx]))
        right_mass = float(np.sum(mass[right_idx]))
        default_left = left_mass >= right_mass
    return left_idx, right_idx, default_left


def tree_predict(node: TreeNode, x: np.ndarray) -> float:
    """Route one feature vector (NaN = missing) to its leaf value."""
    while not node.is_leaf:
        v = x[node.feature]
        if math.isnan(v):
            node = node.left if node.default_left else node.right
        elif v <= node.threshold:
            node = node.left
        else:
            node = node.right
    return node.value


def tree_predict_many(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.float64)
    for i in range(X.shape[0]):
        out[i] = tree_predict(node, X[i])
    return out


def tree_depth(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def leaf_count(node: TreeNode) -> int:
    if node.is_leaf:
        return 1
    return leaf_count(node.left) + leaf_count(node.right)


def node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "default_left": node.default_left,
        "left": node_to_dict(node.left),
        "right": node_to_dict(node.right),
    }


def node_from_dict(obj: dict) -> TreeNode:
    if "value" in obj:
        return TreeNode(value=float(obj["value"]))
    return TreeNode(
        feature=int(obj["feature"]),
        threshold=float(obj["threshold"]),
        default_left=bool(obj["default_left"]),
        left=node_from_dict(obj["left"]),
        right=node_from_dict(obj["right"]),
    )
