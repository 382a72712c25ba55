"""Binary linear classifiers with cost-sensitive decisions.

Both trainers run deterministic full-batch (sub)gradient descent from a zero
initialization on standardized features, so repeated runs on the same data
yield the same model.  The logistic objective and its gradient are exposed so
they can be checked against finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateTrainingSet, DomainError, ParseError, ShapeError


@dataclass
class Standardizer:
    """Per-feature affine normalization fitted on the training set."""

    means: np.ndarray
    scales: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        means = X.mean(axis=0)
        scales = X.std(axis=0)
        scales = np.where(scales > 0.0, scales, 1.0)
        return cls(means=means, scales=scales)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.means) / self.scales


@dataclass
class LinearModel:
    """Affine scorer over standardized features.

    ``kind`` is "logreg" (sigmoid probabilities) or "svm" (margin scores).
    """

    kind: str
    weights: np.ndarray
    bias: float
    means: np.ndarray
    scales: np.ndarray
    metadata: dict = field(default_factory=dict)

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = _as_matrix(X, self.weights.shape[0])
        z = (X - self.means) / self.scales
        return z @ self.weights + self.bias


def _as_matrix(X, n_features: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ShapeError(f"expected a vector or matrix, got ndim={X.ndim}")
    if n_features is not None and X.shape[1] != n_features:
        raise ShapeError(f"expected {n_features} features, got {X.shape[1]}")
    return X


def _check_training_inputs(X, y):
    X = _as_matrix(X)
    y = np.asarray(y, dtype=np.int64).ravel()
    if y.shape[0] != X.shape[0]:
        raise ShapeError(
            f"{X.shape[0]} feature rows but {y.shape[0]} labels"
        )
    if not np.isin(y, (0, 1)).all():
        raise DomainError("labels must be 0 or 1")
    if np.unique(y).shape[0] < 2:
        raise DegenerateTrainingSet("training set must contain both classes")
    return X, y


def _sigmoid(z: np.ndarray) -> np.ndarray:
    """Overflow-safe logistic function."""
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logreg_objective(w, b, X, y, l2):
    """L2-regularized mean negative log-likelihood and its gradient.

    Returns (loss, grad_w, grad_b).  The bias is not regularized.
    """
    w = np.asarray(w, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = X @ w + b
    signed = np.where(y > 0.5, z, -z)
    loss = float(np.mean(np.logaddexp(0.0, -signed)) + 0.5 * l2 * np.dot(w, w))
    resid = _sigmoid(z) - y
    grad_w = X.T @ resid / X.shape[0] + l2 * w
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def train_logreg(
    features,
    labels,
    l2: float = 1e-4,
    epochs: int = 500,
    learning_rate: float = 0.1,
    metadata: dict | None = None,
) -> LinearModel:
    """Logistic regression by full-batch gradient descent, zero init."""
    X, y = _check_training_inputs(features, labels)
    std = Standardizer.fit(X)
    Z = std.apply(X)
    w = np.zeros(Z.shape[1])
    b = 0.0
    for _ in range(epochs):
        _, gw, gb = logreg_objective(w, b, Z, y, l2)
        w -= learning_rate * gw
        b -= learning_rate * gb
    return LinearModel(
        kind="logreg",
        weights=w,
        bias=b,
        means=std.means,
        scales=std.scales,
        metadata=dict(metadata or {}),
    )


def train_linear_svm(
    features,
    labels,
    c: float = 1.0,
    epochs: int = 500,
    metadata: dict | None = None,
) -> LinearModel:
    """Linear soft-margin SVM by full-batch subgradient descent, zero init.

    Minimizes ||w||^2 / (2c) + mean hinge loss with a 1/(lambda * t) step
    size, so duplicating every sample leaves the optimization unchanged.
    """
    X, y = _check_training_inputs(features, labels)
    if c <= 0:
        raise DomainError("c must be positive")
    std = Standardizer.fit(X)
    Z = std.apply(X)
    y_pm = np.where(y > 0, 1.0, -1.0)
    w = np.zeros(Z.shape[1])
    b = 0.0
    lam = 1.0 / c
    for t in range(1, epochs + 1):
        margins = y_pm * (Z @ w + b)
        active = margins < 1.0
        if active.any():
            gw = lam * w - (y_pm[active, None] * Z[active]).sum(axis=0) / Z.shape[0]
            gb = -float(y_pm[active].sum()) / Z.shape[0]
        else:
            gw = lam * w
            gb = 0.0
        step = 1.0 / (lam * t)
        w -= step * gw
        b -= step * gb
    return LinearModel(
        kind="svm",
        weights=w,
        bias=b,
        means=std.means,
        scales=std.scales,
        metadata=dict(metadata or {}),
    )


def predict_proba(model: LinearModel, x) -> np.ndarray | float:
    """Class-1 probability under a logistic model."""
    if model.kind != "logreg":
        raise DomainError("probabilities are only defined for logreg models")
    single = np.asarray(x).ndim == 1
    z = model.decision_values(x)
    p = _sigmoid(z)
    return float(p[0]) if single else p


def predict_label(model: LinearModel, x) -> np.ndarray | int:
    """Hard 0/1 prediction; probability >= 0.5 or margin >= 0 maps to 1."""
    single = np.asarray(x).ndim == 1
    z = model.decision_values(x)
    labels = (z >= 0.0).astype(np.int64)
    return int(labels[0]) if single else labels


@dataclass(frozen=True)
class LossMatrix:
    """Misclassification costs [[0, 1], [alpha, 0]].

    A false negative (true class 1 assigned to class 0) costs ``alpha``
    relative to a unit-cost false positive.
    """

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError("alpha must be positive")

    @property
    def threshold(self) -> float:
        return 1.0 / (1.0 + self.alpha)


def decide(p1: float, loss: LossMatrix) -> int:
    """Minimum-expected-loss assignment: class 1 iff p1 >= 1 / (1 + alpha)."""
    if not 0.0 <= p1 <= 1.0:
        raise DomainError("p1 must lie in [0, 1]")
    return 1 if p1 >= loss.threshold else 0


# Percentages snap to this power-of-two grid (about 3e-14) so that the three
# parts of classifier_metrics sum to exactly 100.0 in any addition order:
# every value and every partial sum is an integer multiple of 2**-45 below
# 2**53, hence exactly representable.
_PCT_GRID = 2**45


def classifier_metrics(predicted, truth) -> dict:
    """Accuracy, false-positive and false-negative rates, in percent of all
    samples; the three values sum to exactly 100."""
    predicted = np.asarray(predicted, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if predicted.shape != truth.shape:
        raise ShapeError("prediction/truth length mismatch")
    if predicted.size == 0:
        raise DomainError("metrics need at least one sample")
    n = int(predicted.size)
    correct = int((predicted == truth).sum())
    fp = int(((predicted == 1) & (truth == 0)).sum())

    def pct_units(count: int) -> int:
        # round(100 * _PCT_GRID * count / n) in exact integer arithmetic
        return (200 * _PCT_GRID * count + n) // (2 * n)

    acc_units = pct_units(correct)
    fp_units = pct_units(fp)
    fn_units = 100 * _PCT_GRID - acc_units - fp_units
    if fn_units < 0:  # both roundings went up; shift one grid step back
        fp_units += fn_units
        fn_units = 0
    return {
        "accuracy_pct": acc_units / _PCT_GRID,
        "fp_pct": fp_units / _PCT_GRID,
        "fn_pct": fn_units / _PCT_GRID,
    }


# ---------------------------------------------------------------------------
# Persistence.


def save_model(model: LinearModel, path: str | Path) -> None:
    payload = {
        "kind": model.kind,
        "weights": [float(v) for v in model.weights],
        "bias": float(model.bias),
        "means": [float(v) for v in model.means],
        "scales": [float(v) for v in model.scales],
        "metadata": model.metadata,
    }
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid model JSON: {exc}") from exc
    for key in ("kind", "weights", "bias", "means", "scales"):
        if key not in payload:
            raise ParseError(f"model file missing {key!r}")
    return LinearModel(
        kind=payload["kind"],
        weights=np.asarray(payload["weights"], dtype=np.float64),
        bias=float(payload["bias"]),
        means=np.asarray(payload["means"], dtype=np.float64),
        scales=np.asarray(payload["scales"], dtype=np.float64),
        metadata=payload.get("metadata", {}),
    )
