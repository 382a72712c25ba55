"""Edge-based separator detection.

Photographic subfigures meet at intensity steps or thin frames.  Candidate
separators are columns (or rows) whose aligned Sobel edge count reaches a
threshold that adapts to the recursion depth and to the clutter of the edge
map.  A 2-pixel artificial frame is added before edge detection so that the
image borders always produce near-full-length Hough peaks; this anchors the
peak maximum that the threshold is relative to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .band_sep import max_runs, prune_irregular
from .params import CfsParams
from .raster import Direction, SeparatorLine, hough_1d, sobel_edges

FRAME = 2  # artificial border width in pixels


@dataclass(frozen=True)
class HoughContext:
    """Inputs of the adaptive peak threshold."""

    depth: int  # zero-based recursion depth
    peak_max: float  # maximum Hough count in the current map
    fill_ratio: float  # fraction of edge pixels in the current map

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if not 0.0 <= self.fill_ratio <= 1.0:
            raise ValueError("fill_ratio must lie in [0, 1]")


def peak_threshold(ctx: HoughContext, ratio_min: float, ratio_base: float) -> float:
    """Minimum Hough count for a candidate peak.

    The base ratio ratio_min * ratio_base**depth (clamped to 1) grows with
    recursion depth, demanding ever more prominent lines; cluttered edge
    maps push the threshold toward the maximum via the sqrt(fill) term.
    """
    ratio = min(1.0, ratio_min * ratio_base**ctx.depth)
    return ctx.peak_max * (ratio + (1.0 - ratio) * np.sqrt(ctx.fill_ratio))


def add_artificial_border(img: np.ndarray) -> np.ndarray:
    """Pad with a 2-pixel frame: outer ring 0, inner ring 1.

    Detected line positions in the padded image map back to the original
    via ``position - FRAME``.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    out = np.zeros((h + 2 * FRAME, w + 2 * FRAME), dtype=np.float64)
    out[1:-1, 1:-1] = 1.0
    out[FRAME:-FRAME, FRAME:-FRAME] = img
    return out


def _consolidated_span(bits: np.ndarray, seg_min: float, gap_max: float) -> int:
    """Length of the longest chain of edge segments along one line.

    Only segments of at least ``seg_min`` pixels participate; consecutive
    participating segments are merged when separated by at most ``gap_max``
    pixels, and the chain length includes the filled gaps.
    """
    segs = [(s, l) for s, l in max_runs(bits) if l >= seg_min]
    if not segs:
        return 0
    best = 0
    chain_start, chain_end = segs[0][0], segs[0][0] + segs[0][1]
    for s, l in segs[1:]:
        if s - chain_end <= gap_max:
            chain_end = s + l
        else:
            best = max(best, chain_end - chain_start)
            chain_start, chain_end = s, s + l
    return max(best, chain_end - chain_start)


def detect_edge_separators(
    img: np.ndarray,
    direction: Direction,
    depth: int,
    params: CfsParams,
) -> list[SeparatorLine]:
    """Separator lines of ``direction`` detected from aligned edges.

    Pipeline: artificial border, Sobel edge map, 1-D Hough counts, peak
    selection at the adaptive threshold (one candidate per above-threshold
    run, strongest position), regularity pruning by Hough value, per-line
    consolidation of the edge run (small gaps between long segments are
    filled) with a minimum-length filter, and a border-distance filter.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    if h < 1 or w < 1:
        return []
    extent = w if direction is Direction.VERTICAL else h  # candidate positions
    line_extent = h if direction is Direction.VERTICAL else w  # line length

    padded = add_artificial_border(img)
    edges = sobel_edges(padded, direction, params.edge_sobelthresh)
    counts = hough_1d(edges, direction)
    peak_max = float(counts.max())
    if peak_max <= 0.0:
        return []
    fill = float(edges.mean())
    threshold = peak_threshold(
        HoughContext(depth=depth, peak_max=peak_max, fill_ratio=fill),
        params.edge_houghratio_min,
        params.edge_houghratio_base,
    )

    positions: list[int] = []
    strengths: list[float] = []
    for start, length in max_runs(counts >= threshold):
        run = counts[start : start + length]
        best = start + int(np.argmax(run))
        pos = best - FRAME
        if 0 < pos < extent:
            positions.append(pos)
            strengths.append(float(counts[best]))

    pruned = prune_irregular(positions, strengths, extent, params.edge_maxdistvar)

    seg_min = params.edge_lenratio * line_extent
    gap_max = params.edge_gapratio * line_extent
    min_span = params.edge_minseplength * line_extent
    border = params.edge_minborderdist * extent
    kept: list[int] = []
    for pos in pruned:
        if min(pos, extent - pos) < border:
            continue
        if direction is Direction.VERTICAL:
            bits = edges[FRAME : FRAME + h, pos + FRAME]
        else:
            bits = edges[pos + FRAME, FRAME : FRAME + w]
        if _consolidated_span(bits, seg_min, gap_max) >= min_span:
            kept.append(pos)
    return [SeparatorLine(direction, pos) for pos in sorted(kept)]
