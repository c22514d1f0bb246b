"""Pure-numpy split-scan kernels.

These are the hot inner loops of tree fitting: given one feature's values
sorted ascending (missing samples excluded, their aggregate mass passed
separately), score every valid split position and return the best one with
its missing-value routing direction.

The compiled extension in _scan.pyx implements the same contracts and MUST
stay bit-identical: both backends accumulate prefix sums sequentially, total
from the last prefix element (never a pairwise sum), and evaluate the score
expressions with identical operation order. Candidate comparison is strictly
greater, so the earliest best index wins in both.
"""

from __future__ import annotations

import numpy as np

NEG_INF = float("-inf")

__all__ = ["scan_grad_splits", "scan_gini_splits", "NEG_INF"]


def scan_grad_splits(
    values: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    g_miss: float,
    h_miss: float,
    n_miss: int,
    reg_lambda: float,
    min_samples_leaf: int,
    min_child_hess: float,
) -> tuple[float, int, bool]:
    """Best second-order split of one sorted feature.

    A split at index i routes x <= values[i] left. Returns (score, index,
    default_left) where score is the summed child objective
    G^2/(H + reg_lambda) with the missing mass routed to its better side;
    (-inf, -1, True) when no valid split exists. reg_lambda must be > 0
    so denominators never vanish.
    """
    n = values.shape[0]
    if n < 2:
        return NEG_INF, -1, True
    cum_g = np.cumsum(grad)
    cum_h = np.cumsum(hess)
    g_total = float(cum_g[-1])
    h_total = float(cum_h[-1])
    gl = cum_g[:-1]
    hl = cum_h[:-1]
    gr = g_total - gl
    hr = h_total - hl
    boundary = values[:-1] < values[1:]
    left_n = np.arange(1, n, dtype=np.int64)
    right_n = n - left_n

    gl_m = gl + g_miss
    hl_m = hl + h_miss
    sl = (gl_m * gl_m) / (hl_m + reg_lambda) + (gr * gr) / (hr + reg_lambda)
    valid_l = (
        boundary
        & (left_n + n_miss >= min_samples_leaf)
        & (right_n >= min_samples_leaf)
        & (hl_m >= min_child_hess)
        & (hr >= min_child_hess)
    )

    gr_m = gr + g_miss
    hr_m = hr + h_miss
    sr = (gl * gl) / (hl + reg_lambda) + (gr_m * gr_m) / (hr_m + reg_lambda)
    valid_r = (
        boundary
        & (left_n >= min_samples_leaf)
        & (right_n + n_miss >= min_samples_leaf)
        & (hl >= min_child_hess)
        & (hr_m >= min_child_hess)
    )

    sl = np.where(valid_l, sl, NEG_INF)
    sr = np.where(valid_r, sr, NEG_INF)
    take_left = sl >= sr
    scores = np.where(take_left, sl, sr)
    best = int(np.argmax(scores))
    best_score = float(scores[best])
    if best_score == NEG_INF:
        return NEG_INF, -1, True
    return best_score, best, bool(take_left[best])


def scan_gini_splits(
    values: np.ndarray,
    wpos: np.ndarray,
    wneg: np.ndarray,
    wpos_miss: float,
    wneg_miss: float,
    n_miss: int,
    min_samples_leaf: int,
) -> tuple[float, int, bool]:
    """Best weighted-gini split of one sorted feature.

    Maximizes the purity score (Wp^2 + Wn^2)/W summed over the children,
    which is equivalent to minimizing weighted gini impurity. Same return
    contract as scan_grad_splits.
    """
    n = values.shape[0]
    if n < 2:
        return NEG_INF, -1, True
    cum_p = np.cumsum(wpos)
    cum_n = np.cumsum(wneg)
    p_total = float(cum_p[-1])
    n_total = float(cum_n[-1])
    wlp = cum_p[:-1]
    wln = cum_n[:-1]
    wrp = p_total - wlp
    wrn = n_total - wln
    boundary = values[:-1] < values[1:]
    left_n = np.arange(1, n, dtype=np.int64)
    right_n = n - left_n

    with np.errstate(divide="ignore", invalid="ignore"):
        wlp_m = wlp + wpos_miss
        wln_m = wln + wneg_miss
        wl_m = wlp_m + wln_m
        wr = wrp + wrn
        sl = (wlp_m * wlp_m + wln_m * wln_m) / wl_m + (wrp * wrp + wrn * wrn) / wr
        valid_l = (
            boundary
            & (left_n + n_miss >= min_samples_leaf)
            & (right_n >= min_samples_leaf)
            & (wl_m > 0.0)
            & (wr > 0.0)
        )

        wrp_m = wrp + wpos_miss
        wrn_m = wrn + wneg_miss
        wl = wlp + wln
        wr_m = wrp_m + wrn_m
        sr = (wlp * wlp + wln * wln) / wl + (wrp_m * wrp_m + wrn_m * wrn_m) / wr_m
        valid_r = (
            boundary
            & (left_n >= min_samples_leaf)
            & (right_n + n_miss >= min_samples_leaf)
            & (wl > 0.0)
            & (wr_m > 0.0)
        )

    sl = np.where(valid_l, sl, NEG_INF)
    sr = np.where(valid_r, sr, NEG_INF)
    take_left = sl >= sr
    scores = np.where(take_left, sl, sr)
    best = int(np.argmax(scores))
    best_score = float(scores[best])
    if best_score == NEG_INF:
        return NEG_INF, -1, True
    return best_score, best, bool(take_left[best])
