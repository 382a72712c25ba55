"""Illustration-vs-photo classification used to route separator detection.

Figures that look like illustrations (charts, diagrams: peaked histograms,
bright backgrounds) are separated by white-band analysis; photographic
figures by edge analysis.  Training data carries one meta label per source
panel, so multi-label lists must be collapsed to a single target first.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError
from .learn import LinearModel, predict_proba

HISTOGRAM_BINS = 256


class MetaLabel(enum.Enum):
    ILLUSTRATION = "illustration"
    NON_ILLUSTRATION = "non-illustration"


class MappingStrategy(enum.Enum):
    FIRST = "first"
    MAJORITY = "majority"
    UNANIMOUS = "unanimous"
    GREEDY = "greedy"


class Routing(enum.Enum):
    BAND = "band"
    EDGE = "edge"


def simple2(img: np.ndarray) -> np.ndarray:
    """[entropy in bits of the 256-bin intensity histogram, mean intensity]."""
    img = np.asarray(img, dtype=np.float64)
    if img.size == 0:
        raise DomainError("cannot featurize an empty image")
    counts, _ = np.histogram(img, bins=HISTOGRAM_BINS, range=(0.0, 1.0))
    probs = counts[counts > 0] / img.size
    entropy = float(-(probs * np.log2(probs)).sum())
    return np.array([entropy, float(img.mean())])


def simple11(img: np.ndarray) -> np.ndarray:
    """simple2 plus the nine deciles (10%..90%) of the intensity values.

    Deciles use the nearest-rank convention: the ceil(j*n/10)-th smallest
    value for j = 1..9.
    """
    base = simple2(img)
    values = np.sort(np.asarray(img, dtype=np.float64).ravel())
    n = values.shape[0]
    ranks = [(j * n + 9) // 10 for j in range(1, 10)]  # ceil(j*n/10)
    deciles = values[np.asarray(ranks) - 1]
    return np.concatenate([base, deciles])


def map_labels(labels: list[MetaLabel], strategy: MappingStrategy) -> MetaLabel | None:
    """Collapse per-panel meta labels to one target; None means dropped.

    FIRST takes the first label; MAJORITY the most frequent (ties dropped);
    UNANIMOUS keeps only single-class lists; GREEDY yields ILLUSTRATION if
    any panel is one.
    """
    if not labels:
        raise DomainError("label list must be non-empty")
    if strategy is MappingStrategy.FIRST:
        return labels[0]
    if strategy is MappingStrategy.GREEDY:
        if MetaLabel.ILLUSTRATION in labels:
            return MetaLabel.ILLUSTRATION
        return MetaLabel.NON_ILLUSTRATION
    counts = Counter(labels)
    if strategy is MappingStrategy.UNANIMOUS:
        return labels[0] if len(counts) == 1 else None
    ranked = counts.most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return None
    return ranked[0][0]


@dataclass
class IlluModel:
    """Routing model: a linear classifier plus its feature definition.

    ``feature_kind`` selects the built-in extractor ("simple2", "simple11")
    or "external" for caller-supplied vectors via ``feature_fn``.
    """

    inner: LinearModel
    feature_kind: str = "simple2"
    decision_threshold: float = 0.1
    feature_fn: object | None = field(default=None, repr=False)

    def features(self, img: np.ndarray) -> np.ndarray:
        if self.feature_kind == "simple2":
            return simple2(img)
        if self.feature_kind == "simple11":
            return simple11(img)
        if self.feature_kind == "external":
            if self.feature_fn is None:
                raise DomainError("external feature kind needs a feature_fn")
            return np.asarray(self.feature_fn(img), dtype=np.float64)
        raise DomainError(f"unknown feature kind {self.feature_kind!r}")

    def probability(self, img: np.ndarray) -> float | None:
        """Illustration probability; None for margin-only (svm) models."""
        x = self.features(img)
        if self.inner.kind == "logreg":
            return float(predict_proba(self.inner, x))
        return None


def route(model: IlluModel, img: np.ndarray, threshold: float | None = None) -> Routing:
    """Pick the separator detector for one image.

    Probabilistic models route to band analysis when the illustration
    probability strictly exceeds the threshold; margin models when the
    predicted class is illustration.
    """
    if threshold is None:
        threshold = model.decision_threshold
    if model.inner.kind == "logreg":
        p = model.probability(img)
        return Routing.BAND if p > threshold else Routing.EDGE
    score = float(model.inner.decision_values(model.features(img))[0])
    return Routing.BAND if score >= 0.0 else Routing.EDGE


def save_illu_model(model: IlluModel, path: str | Path) -> None:
    inner = model.inner
    payload = {
        "kind": "illustration",
        "feature_kind": model.feature_kind,
        "decision_threshold": model.decision_threshold,
        "inner": {
            "kind": inner.kind,
            "weights": [float(v) for v in inner.weights],
            "bias": float(inner.bias),
            "means": [float(v) for v in inner.means],
            "scales": [float(v) for v in inner.scales],
            "metadata": inner.metadata,
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")


def load_illu_model(path: str | Path) -> IlluModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid model JSON: {exc}") from exc
    if payload.get("kind") != "illustration":
        raise ParseError("not an illustration model file")
    inner = payload["inner"]
    model = LinearModel(
        kind=inner["kind"],
        weights=np.asarray(inner["weights"], dtype=np.float64),
        bias=float(inner["bias"]),
        means=np.asarray(inner["means"], dtype=np.float64),
        scales=np.asarray(inner["scales"], dtype=np.float64),
        metadata=inner.get("metadata", {}),
    )
    return IlluModel(
        inner=model,
        feature_kind=payload.get("feature_kind", "simple2"),
        decision_threshold=float(payload.get("decision_threshold", 0.1)),
    )
