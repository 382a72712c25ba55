"""White-band separator detection.

Illustrations typically place subfigures on a white page background, so
separators appear as full-extent runs of white lines.  The image is
binarized at its mean intensity; a candidate band is a maximal run of lines
that are entirely white, and the detected line is the band's center.
"""

from __future__ import annotations

import numpy as np

from .params import CfsParams
from .raster import Direction, SeparatorLine, gap_variance


def max_runs(bits) -> list[tuple[int, int]]:
    """Maximal runs of true values as (start, length) pairs, in order."""
    bits = np.asarray(bits, dtype=bool)
    if bits.size == 0:
        return []
    padded = np.concatenate(([False], bits, [False]))
    changes = np.flatnonzero(padded[1:] != padded[:-1])
    starts = changes[0::2]
    ends = changes[1::2]
    return [(int(s), int(e - s)) for s, e in zip(starts, ends)]


def prune_irregular(
    positions: list[int],
    strengths: list[float],
    extent: int,
    max_distvar: float,
) -> list[int]:
    """Drop weak candidates until the line spacing is regular.

    Candidates are ranked by strength (descending, stable); the weakest is
    removed while the population variance of normalized gaps between the
    remaining positions and the borders exceeds ``max_distvar``.  A lone
    candidate is always admissible.  Returns positions sorted ascending.
    """
    if not positions:
        return []
    order = np.argsort(-np.asarray(strengths, dtype=np.float64), kind="stable")
    kept = list(order)
    pos = np.asarray(positions)
    while len(kept) > 1 and gap_variance(pos[kept], extent) > max_distvar:
        kept.pop()
    return sorted(int(pos[i]) for i in kept)


def detect_band_separators(
    img: np.ndarray,
    direction: Direction,
    params: CfsParams,
) -> list[SeparatorLine]:
    """Centers of sufficiently wide, regularly spaced all-white bands.

    A line counts as white when every pixel is at or above the image mean
    (equivalently, its mean binary projection equals 1).  Runs shorter than
    band_minsepwidth * extent (at least one pixel) are ignored; surviving
    centers are regularity-pruned with run width as the strength and then
    trimmed near the borders.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    extent = w if direction is Direction.VERTICAL else h
    if extent < 3:
        return []
    white = img >= img.mean()
    axis = 0 if direction is Direction.VERTICAL else 1
    all_white = white.all(axis=axis)

    min_width = max(1.0, params.band_minsepwidth * extent)
    runs = [(s, l) for s, l in max_runs(all_white) if l >= min_width]
    if not runs:
        return []
    centers = [s + (l - 1) // 2 for s, l in runs]
    widths = [float(l) for _, l in runs]
    pruned = prune_irregular(centers, widths, extent, params.band_maxdistvar)

    border = params.band_minborderdist * extent
    kept = [
        c
        for c in pruned
        if min(c, extent - c) >= border and 0 < c < extent
    ]
    return [SeparatorLine(direction, c) for c in kept]
