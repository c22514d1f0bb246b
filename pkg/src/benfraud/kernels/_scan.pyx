# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled split-scan kernels.

Mirror of pyscan.py, kept bit-identical on purpose: prefix sums accumulate
sequentially exactly like np.cumsum, totals come from the final prefix value,
score expressions share pyscan's operation order (the build disables
fp-contraction so no FMA regrouping sneaks in), routing ties prefer the left
child, and the best candidate is the first strict maximum.
"""

from libc.math cimport INFINITY


def scan_grad_splits(
    const double[::1] values,
    const double[::1] grad,
    const double[::1] hess,
    double g_miss,
    double h_miss,
    long n_miss,
    double reg_lambda,
    long min_samples_leaf,
    double min_child_hess,
):
    """See pyscan.scan_grad_splits; identical contract and identical bits."""
    cdef Py_ssize_t n = values.shape[0]
    if n < 2:
        return -INFINITY, -1, True

    cdef double g_total = 0.0
    cdef double h_total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        g_total += grad[i]
        h_total += hess[i]

    cdef double gl = 0.0
    cdef double hl = 0.0
    cdef double gr, hr, gl_m, hl_m, gr_m, hr_m, sl, sr, score
    cdef long left_n, right_n
    cdef bint valid_l, valid_r, take_left

    cdef double best_score = -INFINITY
    cdef Py_ssize_t best_idx = -1
    cdef bint best_left = True

    for i in range(n - 1):
        gl += grad[i]
        hl += hess[i]
        if not values[i] < values[i + 1]:
            continue
        gr = g_total - gl
        hr = h_total - hl
        left_n = i + 1
        right_n = n - left_n

        gl_m = gl + g_miss
        hl_m = hl + h_miss
        valid_l = (
            left_n + n_miss >= min_samples_leaf
            and right_n >= min_samples_leaf
            and hl_m >= min_child_hess
            and hr >= min_child_hess
        )
        if valid_l:
            sl = (gl_m * gl_m) / (hl_m + reg_lambda) + (gr * gr) / (hr + reg_lambda)
        else:
            sl = -INFINITY

        gr_m = gr + g_miss
        hr_m = hr + h_miss
        valid_r = (
            left_n >= min_samples_leaf
            and right_n + n_miss >= min_samples_leaf
            and hl >= min_child_hess
            and hr_m >= min_child_hess
        )
        if valid_r:
            sr = (gl * gl) / (hl + reg_lambda) + (gr_m * gr_m) / (hr_m + reg_lambda)
        else:
            sr = -INFINITY

        take_left = sl >= sr
        score = sl if take_left else sr
        if score > best_score:
            best_score = score
            best_idx = i
            best_left = take_left

    if best_score == -INFINITY:
        return -INFINITY, -1, True
    return best_score, best_idx, bool(best_left)


def scan_gini_splits(
    const double[::1] values,
    const double[::1] wpos,
    const double[::1] wneg,
    double wpos_miss,
    double wneg_miss,
    long n_miss,
    long min_samples_leaf,
):
    """See pyscan.scan_gini_splits; identical contract and identical bits."""
    cdef Py_ssize_t n = values.shape[0]
    if n < 2:
        return -INFINITY, -1, True

    cdef double p_total = 0.0
    cdef double n_total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        p_total += wpos[i]
        n_total += wneg[i]

    cdef double wlp = 0.0
    cdef double wln = 0.0
    cdef double wrp, wrn, wlp_m, wln_m, wrp_m, wrn_m, wl, wr, wl_m, wr_m, sl, sr, score
    cdef long left_n, right_n
    cdef bint valid_l, valid_r, take_left

    cdef double best_score = -INFINITY
    cdef Py_ssize_t best_idx = -1
    cdef bint best_left = True

    for i in range(n - 1):
        wlp += wpos[i]
        wln += wneg[i]
        if not values[i] < values[i + 1]:
            continue
        wrp = p_total - wlp
        wrn = n_total - wln
        left_n = i + 1
        right_n = n - left_n

        wlp_m = wlp + wpos_miss
        wln_m = wln + wneg_miss
        wl_m = wlp_m + wln_m
        wr = wrp + wrn
        valid_l = (
            left_n + n_miss >= min_samples_leaf
            and right_n >= min_samples_leaf
            and wl_m > 0.0
            and wr > 0.0
        )
        if valid_l:
            sl = (wlp_m * wlp_m + wln_m * wln_m) / wl_m + (wrp * wrp + wrn * wrn) / wr
        else:
            sl = -INFINITY

        wrp_m = wrp + wpos_miss
        wrn_m = wrn + wneg_miss
        wl = wlp + wln
        wr_m = wrp_m + wrn_m
        valid_r = (
            left_n >= min_samples_leaf
            and right_n + n_miss >= min_samples_leaf
            and wl > 0.0
            and wr_m > 0.0
        )
        if valid_r:
            sr = (wlp * wlp + wln * wln) / wl + (wrp_m * wrp_m + wrn_m * wrn_m) / wr_m
        else:
            sr = -INFINITY

        take_left = sl >= sr
        score = sl if take_left else sr
        if score > best_score:
            best_score = score
            best_idx = i
            best_left = take_left

    if best_score == -INFINITY:
        return -INFINITY, -1, True
    return best_score, best_idx, bool(best_left)
