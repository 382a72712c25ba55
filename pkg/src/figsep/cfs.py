"""Recursive compound figure separation.

One routing decision (band-based vs edge-based detection) applies to the
whole figure, or optionally to every sub-figure.  Each recursion level trims
homogeneous border bands, abandons empty or tiny regions, detects separator
candidates in both directions, keeps the direction with the more regular
spacing, splits there and recurses on the parts.  Leaves are the returned
sub-figure bounding boxes; if nothing survives, the whole image is returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .band_sep import detect_band_separators
from .edge_sep import detect_edge_separators
from .errors import DomainError, NoSeparators
from .illustration import IlluModel, Routing, route
from .params import CfsParams
from .raster import Direction, Rect, SeparatorLine, crop, gap_variance

# A border line is homogeneous when its intensity range stays within this.
BORDER_HOMOGENEITY_TOL = 0.02


class Variant(enum.Enum):
    CLASSIFY_ONCE = "once"
    CLASSIFY_PER_SUBFIGURE = "per-subfigure"


@dataclass
class SeparationResult:
    rects: list[Rect]
    routing: Routing
    depth_reached: int = 0


def _homogeneous(line: np.ndarray, tol: float) -> bool:
    return float(line.max()) - float(line.min()) <= tol


def remove_border_bands(
    img: np.ndarray, tol: float = BORDER_HOMOGENEITY_TOL
) -> Rect | None:
    """Bounding box after shrinking away homogeneous outer lines.

    Each side moves inward while the outermost remaining line of pixels has
    an intensity range of at most ``tol``; shrinking one side can expose new
    homogeneous lines on another, so sides are revisited until stable.
    Returns None when the whole image is consumed.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    top, bottom, left, right = 0, h, 0, w
    changed = True
    while changed and top < bottom and left < right:
        changed = False
        while top < bottom and _homogeneous(img[top, left:right], tol):
            top += 1
            changed = True
        while bottom > top and _homogeneous(img[bottom - 1, left:right], tol):
            bottom -= 1
            changed = True
        if top >= bottom:
            break
        while left < right and _homogeneous(img[top:bottom, left], tol):
            left += 1
            changed = True
        while right > left and _homogeneous(img[top:bottom, right - 1], tol):
            right -= 1
            changed = True
    if top >= bottom or left >= right:
        return None
    return Rect(left, top, right - left, bottom - top)


def decide_direction(
    v_lines: list[SeparatorLine],
    h_lines: list[SeparatorLine],
    bounds: Rect,
) -> Direction:
    """Direction whose candidate lines are more regularly spaced.

    Regularity is the population variance of normalized gaps (borders
    included); the lower variance wins, ties go to vertical.  When only one
    direction has candidates it wins outright.
    """
    if not v_lines and not h_lines:
        raise NoSeparators("no candidate lines in either direction")
    if not h_lines:
        return Direction.VERTICAL
    if not v_lines:
        return Direction.HORIZONTAL
    v_var = gap_variance([ln.position for ln in v_lines], bounds.w)
    h_var = gap_variance([ln.position for ln in h_lines], bounds.h)
    return Direction.VERTICAL if v_var <= h_var else Direction.HORIZONTAL


def split(bounds: Rect, lines: list[SeparatorLine], direction: Direction) -> list[Rect]:
    """Split ``bounds`` at separator positions (relative to the bounds).

    n lines yield n + 1 rectangles; each line's own pixel column or row
    belongs to the following rectangle.
    """
    extent = bounds.w if direction is Direction.VERTICAL else bounds.h
    positions = [ln.position for ln in lines]
    if any(not 0 < p < extent for p in positions):
        raise DomainError("separator positions must lie strictly inside the bounds")
    if sorted(set(positions)) != positions:
        raise DomainError("separator positions must be strictly increasing")
    edges = [0] + positions + [extent]
    rects = []
    for a, b in zip(edges[:-1], edges[1:]):
        if direction is Direction.VERTICAL:
            rects.append(Rect(bounds.x + a, bounds.y, b - a, bounds.h))
        else:
            rects.append(Rect(bounds.x, bounds.y + a, bounds.w, b - a))
    return rects


def _maxdepth(params: CfsParams, routing: Routing) -> int:
    return params.edge_maxdepth if routing is Routing.EDGE else params.band_maxdepth


def separate(
    img: np.ndarray,
    params: CfsParams | None = None,
    illu: IlluModel | None = None,
    variant: Variant = Variant.CLASSIFY_ONCE,
    force_routing: Routing | None = None,
) -> SeparationResult:
    """Separate one figure into sub-figure rectangles.

    Routing comes from ``force_routing`` when given, otherwise from the
    illustration model (once at the top, or per sub-figure under the
    per-subfigure variant).  Rectangles are returned in recursion order and
    are pairwise disjoint within the image.
    """
    img = np.asarray(img, dtype=np.float64)
    if params is None:
        params = CfsParams.optimal()
    if force_routing is None and illu is None:
        raise DomainError("separation needs an illustration model or a forced routing")
    h, w = img.shape
    whole = Rect(0, 0, w, h)
    original_area = float(w * h)
    state = {"depth_reached": 0}

    def routing_for(sub_img: np.ndarray) -> Routing:
        if force_routing is not None:
            return force_routing
        return route(illu, sub_img, params.decision_threshold)

    def recurse(region: Rect, depth: int, routing: Routing) -> list[Rect]:
        inner = remove_border_bands(crop(img, region))
        if inner is None:
            return []
        bbox = Rect(region.x + inner.x, region.y + inner.y, inner.w, inner.h)
        if bbox.area < params.elim_area * original_area:
            return []
        content = crop(img, bbox)
        if variant is Variant.CLASSIFY_PER_SUBFIGURE and force_routing is None:
            routing = routing_for(content)
        if depth >= _maxdepth(params, routing):
            return []
        state["depth_reached"] = max(state["depth_reached"], depth)

        v_lines: list[SeparatorLine] = []
        h_lines: list[SeparatorLine] = []
        if bbox.w >= params.mindim:
            v_lines = _detect(content, Direction.VERTICAL, depth, routing, params)
        if bbox.h >= params.mindim:
            h_lines = _detect(content, Direction.HORIZONTAL, depth, routing, params)
        if not v_lines and not h_lines:
            return [bbox]

        direction = decide_direction(v_lines, h_lines, bbox)
        lines = v_lines if direction is Direction.VERTICAL else h_lines
        parts = split(bbox, lines, direction)
        rects: list[Rect] = []
        for part in parts:
            rects.extend(recurse(part, depth + 1, routing))
        return rects

    top_routing = routing_for(img)
    rects = recurse(whole, 0, top_routing)
    if not rects:
        rects = [whole]
    return SeparationResult(
        rects=rects, routing=top_routing, depth_reached=state["depth_reached"]
    )


def _detect(
    content: np.ndarray,
    direction: Direction,
    depth: int,
    routing: Routing,
    params: CfsParams,
) -> list[SeparatorLine]:
    if routing is Routing.BAND:
        return detect_band_separators(content, direction, params)
    return detect_edge_separators(content, direction, depth, params)
