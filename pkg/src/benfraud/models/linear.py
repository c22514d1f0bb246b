"""Weighted L2-regularized logistic regression via Newton iterations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass
class LogregModel:
    """Coefficients live in standardized feature space.

    Imputation and standardization parameters are stored so prediction can
    apply the exact transform learned on the training partition.
    """

    coef: np.ndarray
    intercept: float
    feature_medians: np.ndarray
    feature_means: np.ndarray
    feature_stds: np.ndarray
    converged: bool = True
    n_iter: int = 0

    def transform(self, X: np.ndarray) -> np.ndarray:
        Z = np.array(X, dtype=np.float64, copy=True)
        for j in range(Z.shape[1]):
            col = Z[:, j]
            col[np.isnan(col)] = self.feature_medians[j]
        return (Z - self.feature_means) / self.feature_stds

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        z = self.transform(X) @ self.coef + self.intercept
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out

    def predict_proba_one(self, x: np.ndarray) -> float:
        return float(self.predict_proba(x.reshape(1, -1))[0])


def _nanmedian_per_column(X: np.ndarray) -> np.ndarray:
    medians = np.zeros(X.shape[1], dtype=np.float64)
    for j in range(X.shape[1]):
        col = X[:, j]
        finite = col[~np.isnan(col)]
        medians[j] = float(np.median(finite)) if finite.size else 0.0
    return medians


def fit_logreg(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    *,
    l2: float = 1.0,
    max_iter: int = 50,
    tol: float = 1e-8,
) -> LogregModel:
    """Fit by iteratively reweighted least squares.

    Missing cells are imputed with the per-column training median (0 when a
    column is entirely missing), then columns are standardized by training
    mean and population std (std of 0 is replaced by 1 so constant columns
    stay constant instead of dividing by zero). The L2 penalty applies to
    coefficients only, never the intercept.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if l2 < 0:
        raise ValueError(f"l2 must be nonnegative, got {l2}")

    medians = _nanmedian_per_column(X)
    Z = np.array(X, copy=True)
    for j in range(Z.shape[1]):
        col = Z[:, j]
        col[np.isnan(col)] = medians[j]
    if not np.all(np.isfinite(Z)):
        raise DataError("features contain non-finite values after imputation")

    means = np.mean(Z, axis=0)
    stds = np.std(Z, axis=0)
    stds = np.where(stds <= 0.0, 1.0, stds)
    Z = (Z - means) / stds

    n, d = Z.shape
    design = np.hstack([Z, np.ones((n, 1))])
    beta = np.zeros(d + 1, dtype=np.float64)
    penalty = np.diag([l2] * d + [0.0]).astype(np.float64)
    y01 = (y + 1.0) / 2.0

    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        z = design @ beta
        ez = np.exp(-np.abs(z))
        p = np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))
        grad = design.T @ (w * (p - y01)) + penalty @ beta
        curv = w * p * (1.0 - p)
        hess = design.T @ (design * curv[:, None]) + penalty
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            hess = hess + np.eye(d + 1) * 1e-8
            step = np.linalg.solve(hess, grad)
        beta = beta - step
        if float(np.max(np.abs(step))) < tol:
            converged = True
            break

    return LogregModel(
        coef=beta[:d],
        intercept=float(beta[d]),
        feature_medians=medians,
        feature_means=means,
        feature_stds=stds,
        converged=converged,
        n_iter=n_iter,
    )
