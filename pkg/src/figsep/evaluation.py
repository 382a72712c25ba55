"""Bounding-box evaluation protocols for separation results.

Two protocols are implemented.  The association protocol greedily pairs
each ground-truth rectangle with the unassociated detection it covers best
(requiring strictly more than 2/3 of the detection's area) and reports
associations over max(gt, detected).  The exclusive-overlap protocol counts
a detection as a true positive when exactly one ground-truth rectangle
overlaps more than 75% of itself with it and every other one less than 5%.

The chained classification+separation evaluation represents non-compound
images, by either annotation or prediction, as a single rectangle covering
the entire image; separation outputs consisting of a single rectangle are
normalized the same way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .data import FigureAnnotation
from .errors import AlignmentError, DomainError
from .raster import Rect, intersect

ASSOCIATION_MIN_OVERLAP = 2.0 / 3.0
TP_COVER_RATIO = 0.75
TP_EXCLUSIVE_RATIO = 0.05


def overlap_g(g: Rect, f: Rect) -> float:
    """Overlap area as a fraction of the ground-truth rectangle."""
    inter = intersect(g, f)
    return (inter.area / g.area) if inter else 0.0


def overlap_f(g: Rect, f: Rect) -> float:
    """Overlap area as a fraction of the detected rectangle."""
    inter = intersect(g, f)
    return (inter.area / f.area) if inter else 0.0


def count_associations(gt: list[Rect], det: list[Rect]) -> int:
    """Number of ground-truth rects associated with a distinct detection.

    Ground truth is visited in list order; each takes the not yet associated
    detection with the highest overlap fraction, provided that fraction
    strictly exceeds 2/3.  With pairwise disjoint ground truth the count is
    independent of both list orders.
    """
    taken = [False] * len(det)
    count = 0
    for g in gt:
        best_j = -1
        best_ratio = 0.0
        for j, f in enumerate(det):
            if taken[j]:
                continue
            ratio = overlap_f(g, f)
            if ratio > best_ratio:
                best_j, best_ratio = j, ratio
        if best_ratio > ASSOCIATION_MIN_OVERLAP:
            taken[best_j] = True
            count += 1
    return count


def imageclef_score(gt: list[Rect], det: list[Rect]) -> float:
    """Per-figure association accuracy: C / max(gt count, detection count)."""
    if not gt:
        raise DomainError("ground truth must contain at least one rect")
    if not det:
        return 0.0
    return count_associations(gt, det) / max(len(gt), len(det))


def nlm_true_positives(gt: list[Rect], det: list[Rect]) -> int:
    """Detections covered well by exactly one ground-truth rect.

    A detection is a true positive when exactly one ground-truth rect
    overlaps it by more than 75% of that rect's own area and every other
    ground-truth rect overlaps by less than 5% of its own area.
    """
    tp = 0
    for f in det:
        ratios = [overlap_g(g, f) for g in gt]
        strong = [r for r in ratios if r > TP_COVER_RATIO]
        weak_ok = all(r < TP_EXCLUSIVE_RATIO for r in ratios if r <= TP_COVER_RATIO)
        if len(strong) == 1 and weak_ok:
            tp += 1
    return tp


@dataclass(frozen=True)
class NlmScores:
    precision_pct: float
    recall_pct: float
    f1_pct: float
    precision_defined: bool = True


def nlm_aggregate(gt_total: int, det_total: int, tp_total: int) -> NlmScores:
    """Precision/recall/F1 in percent from corpus-level totals.

    With no detections the precision is undefined and reported as 0 with
    ``precision_defined`` false; F1 is 0 whenever P + R is 0.
    """
    if gt_total <= 0:
        raise DomainError("ground-truth total must be positive")
    if tp_total < 0 or det_total < 0:
        raise DomainError("totals must be non-negative")
    if det_total == 0:
        precision, defined = 0.0, False
    else:
        precision, defined = 100.0 * tp_total / det_total, True
    recall = 100.0 * tp_total / gt_total
    if precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return NlmScores(
        precision_pct=precision,
        recall_pct=recall,
        f1_pct=f1,
        precision_defined=defined,
    )


@dataclass
class EvalReport:
    protocol: str
    per_image: list[dict] = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "aggregate": self.aggregate,
            "per_image": self.per_image,
            "config": self.config,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), indent=2), encoding="utf-8"
        )

    def summary_text(self) -> str:
        lines = [f"protocol: {self.protocol}", f"images: {len(self.per_image)}"]
        if self.protocol == "imageclef":
            lines.append(f"accuracy: {100.0 * self.aggregate['accuracy']:.1f}%")
        else:
            agg = self.aggregate
            lines.append(
                "gt/detected/true-positives: "
                f"{agg['gt']}/{agg['detected']}/{agg['true_positives']}"
            )
            lines.append(
                f"precision/recall/F1: {agg['precision_pct']:.1f}%"
                f"/{agg['recall_pct']:.1f}%/{agg['f1_pct']:.1f}%"
            )
        return "\n".join(lines)


def _score_pairs(
    pairs: list[tuple[FigureAnnotation, list[Rect], list[Rect]]],
    protocol: str,
) -> EvalReport:
    report = EvalReport(protocol=protocol)
    if protocol == "imageclef":
        total = 0.0
        for anno, gt_rects, det_rects in pairs:
            acc = imageclef_score(gt_rects, det_rects)
            total += acc
            report.per_image.append({"image_id": anno.image_id, "accuracy": acc})
        report.aggregate = {
            "accuracy": total / len(pairs) if pairs else 0.0,
            "images": len(pairs),
        }
    elif protocol == "nlm":
        g_total = d_total = t_total = 0
        for anno, gt_rects, det_rects in pairs:
            tp = nlm_true_positives(gt_rects, det_rects)
            g_total += len(gt_rects)
            d_total += len(det_rects)
            t_total += tp
            report.per_image.append(
                {
                    "image_id": anno.image_id,
                    "true_positives": tp,
                    "gt": len(gt_rects),
                    "detected": len(det_rects),
                }
            )
        scores = nlm_aggregate(g_total, d_total, t_total) if g_total else None
        report.aggregate = {
            "gt": g_total,
            "detected": d_total,
            "true_positives": t_total,
            "precision_pct": scores.precision_pct if scores else 0.0,
            "recall_pct": scores.recall_pct if scores else 0.0,
            "f1_pct": scores.f1_pct if scores else 0.0,
            "precision_defined": scores.precision_defined if scores else False,
        }
    else:
        raise DomainError(f"unknown protocol {protocol!r}")
    return report


def _align(
    gt: list[FigureAnnotation], outputs: list[FigureAnnotation]
) -> list[tuple[FigureAnnotation, FigureAnnotation]]:
    by_id = {anno.image_id: anno for anno in outputs}
    pairs = []
    for anno in gt:
        if anno.image_id not in by_id:
            raise AlignmentError(f"no output for image {anno.image_id!r}")
        pairs.append((anno, by_id[anno.image_id]))
    return pairs


def evaluate_separations(
    gt: list[FigureAnnotation],
    outputs: list[FigureAnnotation],
    protocol: str,
) -> EvalReport:
    """Score separation outputs against ground truth, as annotated."""
    pairs = [
        (anno, anno.rects, out.rects) for anno, out in _align(gt, outputs)
    ]
    return _score_pairs(pairs, protocol)


def chain_evaluate(
    gt: list[FigureAnnotation],
    outputs: list[FigureAnnotation],
    protocol: str,
    image_sizes: dict[str, tuple[int, int]],
) -> EvalReport:
    """Score a classification+separation chain.

    Non-compound ground truth, outputs flagged non-compound, and outputs
    holding a single rectangle are all represented by one rectangle covering
    the entire image, which requires the per-image pixel sizes.
    """
    pairs = []
    for anno, out in _align(gt, outputs):
        if anno.image_id not in image_sizes:
            raise AlignmentError(f"no image size for {anno.image_id!r}")
        w, h = image_sizes[anno.image_id]
        full = Rect(0, 0, w, h)
        gt_rects = anno.rects if anno.is_compound else [full]
        det_rects = list(out.rects)
        if not out.is_compound or len(det_rects) == 1:
            det_rects = [full]
        pairs.append((anno, gt_rects, det_rects))
    return _score_pairs(pairs, protocol)
