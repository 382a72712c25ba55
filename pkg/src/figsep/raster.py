"""Image primitives: grayscale conversion, projections, edges, rectangles.

Conventions used throughout the package:

* A grayscale image is a 2-D float64 array of shape ``(height, width)`` with
  intensities in ``[0, 1]``, row-major.
* A binary image is a 2-D bool array with the same layout.
* ``Direction.VERTICAL`` refers to vertical lines (columns); a vertical
  separator splits an image into left and right parts.  Per-line statistics
  for the vertical direction therefore yield one value per column.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidImage

# ITU-R BT.601 luma weights for RGB -> gray.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class Direction(enum.Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


class Stat(enum.Enum):
    MEAN = "mean"
    VARIANCE = "variance"


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in pixel coordinates, width/height exclusive."""

    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_json(cls, obj: dict) -> "Rect":
        return cls(int(obj["x"]), int(obj["y"]), int(obj["w"]), int(obj["h"]))


@dataclass(frozen=True)
class SeparatorLine:
    """A full-extent separator candidate at ``position`` inside a sub-image.

    For a vertical line the position is a column index, strictly between 0
    and the sub-image width; horizontal lines index rows likewise.
    """

    direction: Direction
    position: int


def intersect(a: Rect, b: Rect) -> Rect | None:
    """Intersection of two rectangles, or None when the overlap is empty."""
    x = max(a.x, b.x)
    y = max(a.y, b.y)
    r = min(a.right, b.right)
    btm = min(a.bottom, b.bottom)
    if r - x <= 0 or btm - y <= 0:
        return None
    return Rect(x, y, r - x, btm - y)


def crop(img: np.ndarray, rect: Rect) -> np.ndarray:
    """View of ``img`` restricted to ``rect``."""
    return img[rect.y : rect.bottom, rect.x : rect.right]


def to_grayscale(pixels: np.ndarray) -> np.ndarray:
    """8-bit pixels (single channel or RGB) -> float64 gray in [0, 1]."""
    arr = np.asarray(pixels)
    if arr.size == 0:
        raise InvalidImage("image has zero extent")
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 2:
        return arr.astype(np.float64) / 255.0
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidImage(f"unsupported image layout {arr.shape}")
    r, g, b = LUMA_WEIGHTS
    flat = arr.astype(np.float64)
    return (flat[:, :, 0] * r + flat[:, :, 1] * g + flat[:, :, 2] * b) / 255.0


def load_image(path: str | Path) -> np.ndarray:
    """Load a PNG or JPEG file as a grayscale array in [0, 1]."""
    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im).astype(np.float64) / 255.0
        return to_grayscale(np.asarray(im.convert("RGB")))


def save_image(img: np.ndarray, path: str | Path) -> None:
    """Write a [0, 1] grayscale array as an 8-bit PNG/JPEG file."""
    data = np.clip(np.rint(np.asarray(img) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path)


def binarize(img: np.ndarray, threshold: float) -> np.ndarray:
    """Binary image: true iff the pixel is strictly brighter than threshold."""
    return np.asarray(img) > threshold


def line_projection(img: np.ndarray, direction: Direction, stat: Stat) -> np.ndarray:
    """Aggregate each pixel line of ``direction`` to a single number.

    Vertical lines are columns, so the vertical projection has one entry per
    column (length = width).  Variance is the population variance.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.size == 0:
        raise InvalidImage("cannot project an empty image")
    axis = 0 if direction is Direction.VERTICAL else 1
    if stat is Stat.MEAN:
        return img.mean(axis=axis)
    return img.var(axis=axis)


def sobel_edges(img: np.ndarray, direction: Direction, threshold: float) -> np.ndarray:
    """Edge map: true where |3x3 Sobel response| exceeds ``threshold``.

    ``Direction.VERTICAL`` detects vertical edges (horizontal gradient).
    Border pixels, where the kernel does not fit, are always false; images
    smaller than the kernel yield an all-false map.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    out = np.zeros((h, w), dtype=bool)
    if h < 3 or w < 3:
        return out
    if direction is Direction.VERTICAL:
        # Smooth along rows with [1, 2, 1], differentiate along columns.
        smooth = img[:-2, :] + 2.0 * img[1:-1, :] + img[2:, :]
        resp = smooth[:, 2:] - smooth[:, :-2]
    else:
        smooth = img[:, :-2] + 2.0 * img[:, 1:-1] + img[:, 2:]
        resp = smooth[2:, :] - smooth[:-2, :]
    out[1:-1, 1:-1] = np.abs(resp) > threshold
    return out


def hough_1d(edges: np.ndarray, direction: Direction) -> np.ndarray:
    """Count edge pixels per full-extent line of ``direction``.

    The degenerate axis-aligned Hough transform: for vertical lines the
    result has one count per column (length = width).
    """
    edges = np.asarray(edges, dtype=bool)
    axis = 0 if direction is Direction.VERTICAL else 1
    return edges.sum(axis=axis)


def gap_variance(positions, extent: int) -> float:
    """Population variance of normalized gaps between sorted line positions.

    The image borders at 0 and ``extent`` participate as virtual lines, so n
    positions yield n + 1 gaps that sum to 1.
    """
    pos = np.sort(np.asarray(positions, dtype=np.float64)) / float(extent)
    xs = np.concatenate(([0.0], pos, [1.0]))
    return float(np.var(np.diff(xs)))
