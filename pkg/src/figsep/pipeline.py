"""Corpus-level orchestration: feature extraction, classification chains,
batch separation with an optional worker pool."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .cfs import SeparationResult, Variant, separate
from .data import Corpus, CorpusEntry, FigureAnnotation
from .errors import AlignmentError
from .features import FeatureSetSpec, QuantizationParams, extract_cfc_features
from .illustration import IlluModel, Routing
from .learn import LinearModel, LossMatrix, decide, predict_proba
from .params import CfsParams
from .raster import Rect, load_image

WORKERS_ENV = "FIGSEP_WORKERS"


def resolve_workers(requested: int | None) -> int:
    """Worker count from the flag, the environment, or 1."""
    if requested is not None and requested > 0:
        return requested
    env = os.environ.get(WORKERS_ENV, "")
    if env.isdigit() and int(env) > 0:
        return int(env)
    return 1


def _map_entries(corpus: Corpus, fn, workers: int):
    """Apply ``fn`` per entry, preserving corpus order."""
    entries = list(corpus.entries)
    if workers <= 1:
        return [fn(e) for e in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, entries))


def corpus_features(
    corpus: Corpus,
    spec: FeatureSetSpec,
    qparams: QuantizationParams = QuantizationParams(),
    workers: int = 1,
) -> tuple[list[str], np.ndarray]:
    """Feature matrix for a corpus, rows in corpus order."""

    def one(entry: CorpusEntry) -> np.ndarray:
        img = load_image(corpus.image_file(entry))
        return extract_cfc_features(img, spec, qparams)

    rows = _map_entries(corpus, one, workers)
    ids = [e.image_id for e in corpus.entries]
    return ids, np.vstack(rows)


def classify_features(
    model: LinearModel,
    ids: list[str],
    X: np.ndarray,
    loss: LossMatrix | None = None,
) -> dict[str, tuple[float, bool]]:
    """Per-image (score, compound?) decisions.

    Probabilistic models apply the loss-matrix threshold; margin models use
    the sign of the decision value (the score is the margin).
    """
    if len(ids) != X.shape[0]:
        raise AlignmentError(
            f"{len(ids)} image ids but {X.shape[0]} feature rows"
        )
    results: dict[str, tuple[float, bool]] = {}
    if model.kind == "logreg":
        loss = loss or LossMatrix(alpha=1.0)
        probs = predict_proba(model, X)
        for image_id, p in zip(ids, probs):
            results[image_id] = (float(p), bool(decide(float(p), loss)))
    else:
        scores = model.decision_values(X)
        for image_id, s in zip(ids, scores):
            results[image_id] = (float(s), bool(s >= 0.0))
    return results


def separate_corpus(
    corpus: Corpus,
    params: CfsParams | None = None,
    illu: IlluModel | None = None,
    force_routing: Routing | None = None,
    variant: Variant = Variant.CLASSIFY_ONCE,
    workers: int = 1,
) -> list[tuple[CorpusEntry, SeparationResult]]:
    """Separate every corpus image, in corpus order."""

    def one(entry: CorpusEntry):
        img = load_image(corpus.image_file(entry))
        result = separate(
            img, params, illu=illu, variant=variant, force_routing=force_routing
        )
        return entry, result

    return _map_entries(corpus, one, workers)


def run_chain(
    corpus: Corpus,
    compound_pred: dict[str, bool] | None = None,
    params: CfsParams | None = None,
    illu: IlluModel | None = None,
    force_routing: Routing | None = None,
    variant: Variant = Variant.CLASSIFY_ONCE,
    workers: int = 1,
) -> list[FigureAnnotation]:
    """Classification+separation chain over a corpus.

    ``compound_pred`` maps image id to the compound decision; None sends
    every image through separation.  Images decided non-compound, and
    separations yielding a single rectangle, are represented by one
    rectangle covering the entire image.
    """
    if compound_pred is not None:
        missing = [e.image_id for e in corpus if e.image_id not in compound_pred]
        if missing:
            raise AlignmentError(f"no classification for images {missing[:3]}")

    def one(entry: CorpusEntry) -> FigureAnnotation:
        full = Rect(0, 0, entry.width, entry.height)
        is_compound = (
            True if compound_pred is None else compound_pred[entry.image_id]
        )
        if not is_compound:
            return FigureAnnotation(entry.image_id, [full], False)
        img = load_image(corpus.image_file(entry))
        result = separate(
            img, params, illu=illu, variant=variant, force_routing=force_routing
        )
        rects = result.rects
        if len(rects) == 1:
            return FigureAnnotation(entry.image_id, [full], False)
        return FigureAnnotation(entry.image_id, rects, True)

    return _map_entries(corpus, one, workers)


def annotations_of(corpus: Corpus) -> list[FigureAnnotation]:
    return [e.annotation for e in corpus.entries]
