"""Compare the compiled and pure-python split-scan backends.

Times the two kernels directly at several input sizes, then times a whole
gbdt fit with each backend patched into the tree builder. Run from the repo
root after an editable install:

    python3 benchmarks/benchmark_backends.py
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from benfraud.kernels import available_backends
import benfraud.models.tree as tree_mod
from benfraud.models import fit_gbdt

REPEATS = 7


def best_of(fn, *args, repeats=REPEATS, inner=1):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        times.append((time.perf_counter() - start) / inner)
    return statistics.median(times)


def grad_inputs(n, rng):
    values = np.sort(rng.normal(size=n))
    grad = rng.normal(size=n)
    hess = rng.uniform(0.01, 1.0, size=n)
    return values, grad, hess, 0.3, 0.2, 3, 1.0, 1, 1e-6


def gini_inputs(n, rng):
    values = np.sort(rng.normal(size=n))
    wpos = rng.uniform(0, 1, size=n)
    wneg = rng.uniform(0, 1, size=n)
    return values, wpos, wneg, 0.4, 0.3, 2, 1


def bench_kernels(backends):
    rng = np.random.default_rng(0)
    rows = []
    for n in (100, 1_000, 10_000, 100_000):
        inner = max(1, 20_000 // n)
        g_args = grad_inputs(n, rng)
        c_args = gini_inputs(n, rng)
        row = {"n": n}
        for name, mod in backends.items():
            row[f"grad_{name}"] = best_of(mod.scan_grad_splits, *g_args, inner=inner)
            row[f"gini_{name}"] = best_of(mod.scan_gini_splits, *c_args, inner=inner)
        rows.append(row)
    return rows


def bench_gbdt(backends):
    rng = np.random.default_rng(1)
    n, d = 2_000, 20
    latent = rng.normal(size=n)
    X = rng.normal(size=(n, d))
    X[:, 0] = latent
    y = np.where(latent + rng.normal(scale=0.5, size=n) > 0, 1, -1).astype(np.int64)
    X[rng.random(size=(n, d)) < 0.05] = np.nan
    w = np.ones(n)

    def fit_once():
        fit_gbdt(
            X, y, w, X, y, w,
            rounds=30, learning_rate=0.1, max_depth=4, reg_lambda=1.0,
            min_samples_leaf=1, min_child_hess=1e-6, min_split_gain=1e-12,
            patience=30,
        )

    original = (tree_mod.scan_grad_splits, tree_mod.scan_gini_splits)
    results = {}
    try:
        for name, mod in backends.items():
            tree_mod.scan_grad_splits = mod.scan_grad_splits
            tree_mod.scan_gini_splits = mod.scan_gini_splits
            results[name] = best_of(fit_once, repeats=3)
    finally:
        tree_mod.scan_grad_splits, tree_mod.scan_gini_splits = original
    return results


def fmt_seconds(s):
    if s < 1e-3:
        return f"{s * 1e6:8.1f} us"
    if s < 1.0:
        return f"{s * 1e3:8.2f} ms"
    return f"{s:8.2f} s "


def main():
    backends = available_backends()
    names = sorted(backends)
    print(f"backends available: {', '.join(names)}")
    if len(names) < 2:
        print("compiled extension not built; timing the python backend only")
    print()

    print("split-scan kernels (median per call)")
    header = f"{'n':>8}"
    for kernel in ("grad", "gini"):
        for name in names:
            header += f"  {kernel + '/' + name:>15}"
    print(header)
    for row in bench_kernels(backends):
        line = f"{row['n']:>8}"
        for kernel in ("grad", "gini"):
            for name in names:
                line += f"  {fmt_seconds(row[f'{kernel}_{name}']):>15}"
        print(line)
    print()

    print("gbdt fit, 2000x20 with 5% missing, 30 rounds (median of 3)")
    gbdt = bench_gbdt(backends)
    for name in names:
        print(f"  {name:>10}: {fmt_seconds(gbdt[name])}")
    if len(names) == 2:
        ratio = gbdt["python"] / gbdt["compiled"]
        print(f"  compiled speedup: {ratio:.2f}x")


if __name__ == "__main__":
    main()
