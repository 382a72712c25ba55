"""Projection features for compound figure classification.

An image is summarized by three projection types per direction: the mean
intensity of each pixel line, the (population) variance of each line, and the
count of Sobel edge pixels aligned on each line, normalized by line length.
Mean and Hough projections are quantized on a logarithmic scale that resolves
the bright/strong end finely; variance uses the mirrored scale resolving the
low end.  Six spatial profiles compress a quantized (or raw) projection into
``k`` spatial bins.

Feature vectors are laid out as all horizontal-direction components (mean,
variance, Hough, in that order) followed by the same for the vertical
direction.  A profile digit of 0 omits the component.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, InputTooSmall, ParseError
from .raster import Direction, Stat, hough_1d, line_projection, sobel_edges

# Gradient threshold for the edge map feeding the Hough-count feature.  Kept
# equal to the separation engine's default Sobel threshold.
HOUGH_GRADIENT_THRESHOLD = 0.02


@dataclass(frozen=True)
class QuantizationParams:
    """Bin counts for the three projection quantizers."""

    p: int = 5  # mean bins
    q: int = 8  # variance bins
    h: int = 3  # hough bins

    def __post_init__(self):
        for name in ("p", "q", "h"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")


@dataclass(frozen=True)
class FeatureSetSpec:
    """Profile selection ``xyz`` plus the spatial bin count ``k``.

    ``x``/``y``/``z`` pick the spatial profile (1..6) for the mean, variance
    and Hough components respectively; 0 drops the component.  At least one
    component must be present.
    """

    mean_profile: int
    variance_profile: int
    hough_profile: int
    k: int

    def __post_init__(self):
        digits = (self.mean_profile, self.variance_profile, self.hough_profile)
        if any(d < 0 or d > 6 for d in digits):
            raise DomainError("profile digits must lie in 0..6")
        if all(d == 0 for d in digits):
            raise DomainError("at least one profile digit must be non-zero")
        if self.k < 1:
            raise DomainError("k must be >= 1")

    @classmethod
    def parse(cls, code: str, k: int) -> "FeatureSetSpec":
        """Build from a three-digit string such as '434'."""
        if len(code) != 3 or not code.isdigit():
            raise DomainError(f"feature set code must be three digits, got {code!r}")
        return cls(int(code[0]), int(code[1]), int(code[2]), k)

    @property
    def code(self) -> str:
        return f"{self.mean_profile}{self.variance_profile}{self.hough_profile}"


def _mean_lower_bounds(p: int) -> np.ndarray:
    # Lower bounds 1 - 2^(i-p) for i = 1..p, descending; bin 1 is brightest.
    return 1.0 - np.exp2(np.arange(1, p + 1) - p)


def _variance_upper_bounds(q: int) -> np.ndarray:
    # Upper bounds 2^(i-q) for i = 1..q, ascending; bin 1 is lowest variance.
    return np.exp2(np.arange(1, q + 1) - q)


def _check_unit_range(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.size and (values.min() < -1e-9 or values.max() > 1.0 + 1e-9):
        raise DomainError("projection values must lie in [0, 1]")
    return np.clip(values, 0.0, 1.0)


def quantize_mean_array(values, p: int) -> np.ndarray:
    """Quantize mean projection values to bins 1..p (bin 1 = brightest)."""
    values = _check_unit_range(values)
    asc = _mean_lower_bounds(p)[::-1]
    # smallest i whose lower bound <= v, i.e. p minus the bounds not above v.
    return (p - np.searchsorted(asc, values, side="right") + 1).astype(np.int64)


def quantize_variance_array(values, q: int) -> np.ndarray:
    """Quantize variance values to bins 1..q (bin 1 = lowest variance)."""
    values = _check_unit_range(values)
    uppers = _variance_upper_bounds(q)
    return (np.searchsorted(uppers, values, side="left") + 1).astype(np.int64)


def quantize_mean(v: float, p: int) -> int:
    return int(quantize_mean_array(np.asarray([v]), p)[0])


def quantize_variance(v: float, q: int) -> int:
    return int(quantize_variance_array(np.asarray([v]), q)[0])


def quantize_hough(v: float, h: int) -> int:
    """Quantize a normalized Hough count; same scheme as the mean quantizer."""
    return int(quantize_mean_array(np.asarray([v]), h)[0])


def spatial_bins(vec: np.ndarray, k: int) -> list[np.ndarray]:
    """Split a projection into k segments of adjacent positions.

    Segment lengths are floor(n/k) or floor(n/k) + 1, with the first
    ``n mod k`` segments carrying the extra position.
    """
    vec = np.asarray(vec)
    if vec.ndim != 1:
        raise DomainError("spatial_bins expects a 1-D vector")
    if vec.shape[0] < k:
        raise InputTooSmall(f"projection of length {vec.shape[0]} cannot fill {k} bins")
    return list(np.array_split(vec, k))


def profile(vec: np.ndarray, method: int, k: int, bins: int) -> np.ndarray:
    """Compress a projection into a profile over k spatial bins.

    For methods 1..5 ``vec`` holds quantized bin indices in 1..bins; method 6
    takes the raw projection values.  All outputs lie in [0, 1]:

    1. per-segment histogram of quantized values, normalized by segment
       length (k * bins values, segment-major);
    2. per-segment mode divided by ``bins`` (ties toward the smaller index);
    3. per-segment relative frequency of the largest quantized value
       (index == bins);
    4. per-segment maximum divided by ``bins``;
    5. per-segment arithmetic mean divided by ``bins``;
    6. magnitudes of the first k DFT coefficients of the raw projection,
       each divided by the projection length (no padding).
    """
    vec = np.asarray(vec)
    if method not in range(1, 7):
        raise DomainError(f"profile method must be 1..6, got {method}")
    if method == 6:
        if vec.shape[0] < k:
            raise InputTooSmall("projection shorter than k")
        coeffs = np.fft.fft(np.asarray(vec, dtype=np.float64))
        return np.abs(coeffs[:k]) / vec.shape[0]

    if vec.size and (vec.min() < 1 or vec.max() > bins):
        raise DomainError("quantized values must lie in 1..bins")
    segments = spatial_bins(vec, k)
    if method == 1:
        out = np.empty(k * bins, dtype=np.float64)
        for i, seg in enumerate(segments):
            counts = np.bincount(seg, minlength=bins + 1)[1:]
            out[i * bins : (i + 1) * bins] = counts / seg.shape[0]
        return out
    values = np.empty(k, dtype=np.float64)
    for i, seg in enumerate(segments):
        if method == 2:
            counts = np.bincount(seg, minlength=bins + 1)[1:]
            values[i] = (int(np.argmax(counts)) + 1) / bins
        elif method == 3:
            values[i] = float(np.mean(seg == bins))
        elif method == 4:
            values[i] = seg.max() / bins
        else:
            values[i] = seg.mean() / bins
    return values


def expected_dimensionality(spec: FeatureSetSpec, params: QuantizationParams) -> int:
    """Feature vector length implied by the set spec and bin counts."""
    total = 0
    for digit, bins in (
        (spec.mean_profile, params.p),
        (spec.variance_profile, params.q),
        (spec.hough_profile, params.h),
    ):
        if digit == 0:
            continue
        total += spec.k * bins if digit == 1 else spec.k
    return 2 * total


def extract_cfc_features(
    img: np.ndarray,
    spec: FeatureSetSpec,
    params: QuantizationParams = QuantizationParams(),
) -> np.ndarray:
    """Feature vector for one image under the given set spec.

    The image must be at least k pixels in each dimension.  Mean and Hough
    bins are re-indexed as p+1-i and h+1-i before profiling so that the
    largest index uniformly denotes the separator-like extreme (brightest
    line, strongest edge alignment) across profiles 2..5.
    """
    img = np.asarray(img, dtype=np.float64)
    h_img, w_img = img.shape
    if h_img < spec.k or w_img < spec.k:
        raise InputTooSmall(
            f"image {w_img}x{h_img} is smaller than k={spec.k} in some dimension"
        )
    parts: list[np.ndarray] = []
    for direction in (Direction.HORIZONTAL, Direction.VERTICAL):
        line_len = w_img if direction is Direction.HORIZONTAL else h_img
        if spec.mean_profile:
            proj = line_projection(img, direction, Stat.MEAN)
            if spec.mean_profile == 6:
                parts.append(profile(proj, 6, spec.k, params.p))
            else:
                q = params.p + 1 - quantize_mean_array(proj, params.p)
                parts.append(profile(q, spec.mean_profile, spec.k, params.p))
        if spec.variance_profile:
            proj = line_projection(img, direction, Stat.VARIANCE)
            if spec.variance_profile == 6:
                parts.append(profile(proj, 6, spec.k, params.q))
            else:
                q = quantize_variance_array(proj, params.q)
                parts.append(profile(q, spec.variance_profile, spec.k, params.q))
        if spec.hough_profile:
            edges = sobel_edges(img, direction, HOUGH_GRADIENT_THRESHOLD)
            counts = hough_1d(edges, direction) / float(line_len)
            if spec.hough_profile == 6:
                parts.append(profile(counts, 6, spec.k, params.h))
            else:
                q = params.h + 1 - quantize_mean_array(counts, params.h)
                parts.append(profile(q, spec.hough_profile, spec.k, params.h))
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# Persistence: one JSON record per image, one image per line.


def save_features(path: str | Path, records: list[dict]) -> None:
    """Write feature records {id, spec, k, values} as JSON Lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "id": rec["id"],
                        "spec": rec["spec"],
                        "k": rec["k"],
                        "values": [float(v) for v in rec["values"]],
                    }
                )
            )
            fh.write("\n")


def load_features(path: str | Path) -> list[dict]:
    """Read feature records written by :func:`save_features`."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line=lineno) from exc
            for key in ("id", "spec", "k", "values"):
                if key not in obj:
                    raise ParseError(f"feature record missing {key!r}", line=lineno)
            obj["values"] = np.asarray(obj["values"], dtype=np.float64)
            records.append(obj)
    return records
