"""Corpus I/O and synthetic figure generation.

A corpus is a directory with an ``annotations.jsonl`` file (one JSON record
per image: id, relative image path, compound flag, sub-figure rects, and
optionally one meta label per panel) plus the image files it references.

The generator draws compound figures with known ground truth: panels on a
white page separated by white bands, framed panels that abut, or panels of
contrasting intensity stitched together without frames.  Every image is
derived from a counter-based RNG stream, so a corpus is reproducible from
(seed, index) alone.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DomainError, MissingAsset, ParseError
from .illustration import MetaLabel
from .raster import Rect, crop, save_image

ANNOTATIONS_NAME = "annotations.jsonl"
IMAGE_DIR_NAME = "images"

# Pixels darker than this count as ink when measuring drawn content.
_INK_THRESHOLD = 0.98


@dataclass
class FigureAnnotation:
    """Ground truth for one figure: its sub-figure rectangles.

    Non-compound figures carry exactly one rectangle covering the whole
    image.
    """

    image_id: str
    rects: list[Rect]
    is_compound: bool

    def __post_init__(self):
        if not self.image_id:
            raise DomainError("annotation needs a non-empty image_id")
        if not self.rects:
            raise DomainError("annotation needs at least one rect")
        if not self.is_compound and len(self.rects) != 1:
            raise DomainError("non-compound annotation must hold exactly one rect")


@dataclass
class CorpusEntry:
    image_id: str
    image_path: str  # relative to the corpus root
    annotation: FigureAnnotation
    labels: list[MetaLabel] | None = None
    width: int = 0
    height: int = 0


@dataclass
class Corpus:
    root: Path
    entries: list[CorpusEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def get(self, image_id: str) -> CorpusEntry:
        for entry in self.entries:
            if entry.image_id == image_id:
                return entry
        raise KeyError(image_id)

    def image_file(self, entry: CorpusEntry) -> Path:
        return self.root / entry.image_path

    def image_sizes(self) -> dict[str, tuple[int, int]]:
        return {e.image_id: (e.width, e.height) for e in self.entries}


def _entry_to_json(entry: CorpusEntry) -> dict:
    record = {
        "image_id": entry.image_id,
        "image_path": entry.image_path,
        "is_compound": entry.annotation.is_compound,
        "rects": [r.to_json() for r in entry.annotation.rects],
    }
    if entry.labels is not None:
        record["labels"] = [l.value for l in entry.labels]
    return record


def save_annotations(corpus: Corpus, path: str | Path | None = None) -> Path:
    """Write the corpus annotation records as JSON Lines."""
    out = Path(path) if path is not None else corpus.root / ANNOTATIONS_NAME
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for entry in corpus.entries:
            fh.write(json.dumps(_entry_to_json(entry)))
            fh.write("\n")
    return out


def save_results(annotations: list[FigureAnnotation], path: str | Path) -> None:
    """Write separation results (annotation records without image paths)."""
    with open(path, "w", encoding="utf-8") as fh:
        for anno in annotations:
            record = {
                "image_id": anno.image_id,
                "is_compound": anno.is_compound,
                "rects": [r.to_json() for r in anno.rects],
            }
            fh.write(json.dumps(record))
            fh.write("\n")


def load_results(path: str | Path) -> list[FigureAnnotation]:
    """Read an annotation record file as a bare list, no image checks.

    Accepts both result files and corpus annotation files; extra keys are
    ignored.
    """
    results: list[FigureAnnotation] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line=lineno) from exc
            for key in ("image_id", "is_compound", "rects"):
                if key not in obj:
                    raise ParseError(f"result record missing {key!r}", line=lineno)
            try:
                rects = [Rect.from_json(r) for r in obj["rects"]]
                anno = FigureAnnotation(
                    image_id=str(obj["image_id"]),
                    rects=rects,
                    is_compound=bool(obj["is_compound"]),
                )
            except (KeyError, TypeError, ValueError, DomainError) as exc:
                raise ParseError(f"malformed result record: {exc}", line=lineno) from exc
            if anno.image_id in seen:
                raise ParseError(f"duplicate image_id {anno.image_id!r}", line=lineno)
            seen.add(anno.image_id)
            results.append(anno)
    return results


def _parse_entry(obj: dict, lineno: int) -> CorpusEntry:
    for key in ("image_id", "image_path", "is_compound", "rects"):
        if key not in obj:
            raise ParseError(f"annotation record missing {key!r}", line=lineno)
    try:
        rects = [Rect.from_json(r) for r in obj["rects"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed rect: {exc}", line=lineno) from exc
    if any(r.w <= 0 or r.h <= 0 for r in rects):
        raise ParseError("rects must have positive extent", line=lineno)
    try:
        annotation = FigureAnnotation(
            image_id=str(obj["image_id"]),
            rects=rects,
            is_compound=bool(obj["is_compound"]),
        )
    except DomainError as exc:
        raise ParseError(str(exc), line=lineno) from exc
    labels = None
    if "labels" in obj and obj["labels"] is not None:
        try:
            labels = [MetaLabel(v) for v in obj["labels"]]
        except ValueError as exc:
            raise ParseError(f"unknown meta label: {exc}", line=lineno) from exc
    return CorpusEntry(
        image_id=annotation.image_id,
        image_path=str(obj["image_path"]),
        annotation=annotation,
        labels=labels,
    )


def load_corpus(root: str | Path) -> Corpus:
    """Load a corpus directory; validates rects against the image bounds.

    A directory without an annotations file is an empty corpus.  Missing
    image files raise MissingAsset; malformed records raise ParseError with
    their line number.
    """
    root = Path(root)
    if not root.is_dir():
        raise MissingAsset(f"corpus root {root} does not exist")
    anno_path = root / ANNOTATIONS_NAME
    corpus = Corpus(root=root)
    if not anno_path.exists():
        return corpus
    seen: set[str] = set()
    with open(anno_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line=lineno) from exc
            entry = _parse_entry(obj, lineno)
            if entry.image_id in seen:
                raise ParseError(
                    f"duplicate image_id {entry.image_id!r}", line=lineno
                )
            seen.add(entry.image_id)
            image_file = root / entry.image_path
            if not image_file.exists():
                raise MissingAsset(f"image file {image_file} not found")
            with Image.open(image_file) as im:
                entry.width, entry.height = im.size
            for r in entry.annotation.rects:
                if r.x < 0 or r.y < 0 or r.right > entry.width or r.bottom > entry.height:
                    raise ParseError(
                        f"rect {r} exceeds image bounds "
                        f"{entry.width}x{entry.height}",
                        line=lineno,
                    )
            corpus.entries.append(entry)
    return corpus


# ---------------------------------------------------------------------------
# Synthetic figures.


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a reproducible synthetic corpus.

    ``separator_kind`` is one of "whiteband", "borderedge", "stitched" or
    "single"; ``content_kind`` one of "noise", "chart" or "mixed" (stitched
    figures always use noise panels, which carry the intensity contrast).
    Ranges are inclusive (low, high) pairs.
    """

    count: int
    separator_kind: str
    rows: tuple[int, int] = (1, 2)
    cols: tuple[int, int] = (1, 2)
    band_width: tuple[int, int] = (16, 40)
    content_kind: str = "mixed"
    markup_noise: float = 0.0
    width: tuple[int, int] = (520, 760)
    height: tuple[int, int] = (420, 640)
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise DomainError("count must be at least 1")
        if self.separator_kind not in ("whiteband", "borderedge", "stitched", "single"):
            raise DomainError(f"unknown separator kind {self.separator_kind!r}")
        if self.content_kind not in ("noise", "chart", "mixed"):
            raise DomainError(f"unknown content kind {self.content_kind!r}")
        if not 0.0 <= self.markup_noise <= 1.0:
            raise DomainError("markup_noise must lie in [0, 1]")
        for name in ("rows", "cols", "band_width", "width", "height"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise DomainError(f"{name} range must satisfy 1 <= low <= high")

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "separator_kind": self.separator_kind,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "band_width": list(self.band_width),
            "content_kind": self.content_kind,
            "markup_noise": self.markup_noise,
            "width": list(self.width),
            "height": list(self.height),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SynthSpec":
        kwargs = dict(obj)
        for name in ("rows", "cols", "band_width", "width", "height"):
            if name in kwargs:
                lo, hi = kwargs[name]
                kwargs[name] = (int(lo), int(hi))
        return cls(**kwargs)


def _ranged(rng: np.random.Generator, bounds: tuple[int, int]) -> int:
    return int(rng.integers(bounds[0], bounds[1] + 1))


def _split_lengths(total: int, parts: int) -> list[int]:
    base, rem = divmod(total, parts)
    return [base + 1 if i < rem else base for i in range(parts)]


def _draw_noise(canvas: np.ndarray, rect: Rect, rng, mean: float | None = None) -> None:
    if mean is None:
        mean = float(rng.uniform(0.25, 0.7))
    # Sigma keeps per-pixel Sobel responses mostly below the edge threshold
    # while still defeating the border-band homogeneity tolerance.
    sigma = float(rng.uniform(0.005, 0.0075))
    patch = rng.normal(mean, sigma, (rect.h, rect.w))
    # Dark grain, one pixel per row and per column.  Binarization thresholds
    # sit near crop means, which panel content keeps above ~0.2, so the grain
    # stops any full line of a bright panel from reading as blank.
    grain = float(rng.uniform(0.06, 0.14))
    rows = np.arange(rect.h)
    cols = np.arange(rect.w)
    patch[rows, (rows * 13) % rect.w] = grain
    patch[(cols * 13) % rect.h, cols] = grain
    canvas[rect.y : rect.bottom, rect.x : rect.right] = np.clip(patch, 0.0, 1.0)


def _draw_chart(canvas: np.ndarray, rect: Rect, rng) -> None:
    """Line chart on a white background filling the cell.

    Ticks protrude outward past the axes, which keeps the edge rows and
    columns of the ink bounding box non-uniform, and every interior row
    crosses the left axis while every interior column crosses either the
    bottom axis or a tick.  The drawn bounding box therefore survives
    border-band removal intact and contains no full-length white line.
    """
    ink = float(rng.uniform(0.05, 0.3))
    x0, y0, x1, y1 = rect.x, rect.y, rect.right - 1, rect.bottom - 1
    tick = 4
    ax = x0 + tick  # left axis column (2 px wide)
    ay = y1 - 1 - tick  # bottom axis row (2 px tall)
    canvas[y0 : ay + 2, ax : ax + 2] = ink
    canvas[ay : ay + 2, ax : x1 + 1] = ink
    for frac in (0.15, 0.4, 0.65, 0.9):
        ty = y0 + int(frac * (ay - y0))
        canvas[ty, x0 : ax] = ink  # y tick, sticks out left
        tx = ax + 2 + int(frac * (x1 - ax - 3))
        canvas[ay + 2 : y1 + 1, tx] = ink  # x tick, sticks out below
    # Jagged polyline across the full plot width, knots alternating between
    # a high and a low band so the line sweeps most of the plot height.
    knots = 8
    plot_l, plot_r = ax + 3, x1 - 1
    plot_t, plot_b = y0 + 2, ay - 2
    xs = np.linspace(plot_l, plot_r, knots).astype(int)
    span = plot_b - plot_t
    ys = []
    for i in range(knots):
        if i % 2 == 0:
            lo, hi = plot_t, plot_t + max(1, span // 3)
        else:
            lo, hi = plot_b - max(1, span // 3), plot_b
        ys.append(int(rng.integers(lo, max(lo + 1, hi))))
    cols = np.arange(plot_l, plot_r + 1)
    line_y = np.interp(cols, xs, ys).astype(int)
    for cx, cy in zip(cols, line_y):
        canvas[cy : cy + 2, cx] = ink
    # Scatter dots within the plot area.
    for _ in range(int(rng.integers(12, 25))):
        sx = int(rng.integers(plot_l, max(plot_l + 1, plot_r - 2)))
        sy = int(rng.integers(plot_t, max(plot_t + 1, plot_b - 1)))
        canvas[sy : sy + 2, sx : sx + 2] = ink


def _draw_markup(canvas: np.ndarray, rect: Rect, rng) -> None:
    """Small text-like mark (panel letter) inside a separator band."""
    if rect.w < 6 or rect.h < 10:
        return
    mx = rect.x + rect.w // 2 - 2
    my = rect.y + int(rng.integers(rect.h // 4, 3 * rect.h // 4))
    canvas[my : my + 6, mx : mx + 4] = 0.15
    canvas[my + 2 : my + 4, mx + 1 : mx + 3] = 1.0  # hole, letter-like


def _ink_bbox(canvas: np.ndarray, cell: Rect) -> Rect:
    """Tight bounding box of drawn (non-white) pixels within a cell."""
    region = crop(canvas, cell)
    mask = region < _INK_THRESHOLD
    row_any = np.flatnonzero(mask.any(axis=1))
    col_any = np.flatnonzero(mask.any(axis=0))
    if row_any.size == 0 or col_any.size == 0:
        return cell
    return Rect(
        cell.x + int(col_any[0]),
        cell.y + int(row_any[0]),
        int(col_any[-1] - col_any[0] + 1),
        int(row_any[-1] - row_any[0] + 1),
    )


def _panel_content(spec: SynthSpec, rng) -> str:
    if spec.separator_kind == "stitched":
        return "noise"
    if spec.content_kind == "mixed":
        return "chart" if rng.random() < 0.5 else "noise"
    return spec.content_kind


def _sample_grid(spec: SynthSpec, rng) -> tuple[int, int]:
    r = _ranged(rng, spec.rows)
    c = _ranged(rng, spec.cols)
    if spec.separator_kind != "single" and r == 1 and c == 1:
        if spec.cols[1] > 1:
            c = 2
        elif spec.rows[1] > 1:
            r = 2
        else:
            raise DomainError("grid ranges admit only 1x1 for a compound kind")
    return r, c


def generate_figure(spec: SynthSpec, index: int):
    """Draw figure ``index`` of the corpus described by ``spec``.

    Returns (image, rects, is_compound, labels).  Deterministic in
    (spec.seed, index).
    """
    rng = np.random.default_rng([spec.seed, index])
    w = _ranged(rng, spec.width)
    h = _ranged(rng, spec.height)
    canvas = np.ones((h, w), dtype=np.float64)

    if spec.separator_kind == "single":
        content = _panel_content(spec, rng)
        if content == "noise":
            _draw_noise(canvas, Rect(0, 0, w, h), rng)
            labels = [MetaLabel.NON_ILLUSTRATION]
        else:
            margin = _ranged(rng, (12, 30))
            _draw_chart(canvas, Rect(margin, margin, w - 2 * margin, h - 2 * margin), rng)
            labels = [MetaLabel.ILLUSTRATION]
        return canvas, [Rect(0, 0, w, h)], False, labels

    r, c = _sample_grid(spec, rng)
    if spec.separator_kind == "whiteband":
        margin = _ranged(rng, (10, 26))
        v_gaps = [_ranged(rng, spec.band_width) for _ in range(c - 1)]
        h_gaps = [_ranged(rng, spec.band_width) for _ in range(r - 1)]
        grid_w = w - 2 * margin - sum(v_gaps)
        grid_h = h - 2 * margin - sum(h_gaps)
    else:
        margin = 0
        v_gaps = [0] * (c - 1)
        h_gaps = [0] * (r - 1)
        grid_w, grid_h = w, h
    cell_ws = _split_lengths(grid_w, c)
    cell_hs = _split_lengths(grid_h, r)
    if min(cell_ws) < 40 or min(cell_hs) < 40:
        raise DomainError("image size leaves panels thinner than 40 px")

    cells: list[Rect] = []
    y = margin
    for i in range(r):
        x = margin
        for j in range(c):
            cells.append(Rect(x, y, cell_ws[j], cell_hs[i]))
            x += cell_ws[j] + (v_gaps[j] if j < c - 1 else 0)
        y += cell_hs[i] + (h_gaps[i] if i < r - 1 else 0)

    labels: list[MetaLabel] = []
    if spec.separator_kind == "stitched":
        m1 = float(rng.uniform(0.2, 0.45))
        m2 = m1 + float(rng.uniform(0.25, 0.35))
        for idx, cell in enumerate(cells):
            i, j = divmod(idx, c)
            _draw_noise(canvas, cell, rng, mean=m1 if (i + j) % 2 == 0 else m2)
            labels.append(MetaLabel.NON_ILLUSTRATION)
        rects = list(cells)
    elif spec.separator_kind == "borderedge":
        frame_px = _ranged(rng, (1, 2))
        frame_ink = float(rng.uniform(0.02, 0.15))
        for cell in cells:
            canvas[cell.y : cell.bottom, cell.x : cell.right] = frame_ink
            interior = Rect(
                cell.x + frame_px,
                cell.y + frame_px,
                cell.w - 2 * frame_px,
                cell.h - 2 * frame_px,
            )
            content = _panel_content(spec, rng)
            if content == "noise":
                _draw_noise(canvas, interior, rng)
                labels.append(MetaLabel.NON_ILLUSTRATION)
            else:
                canvas[
                    interior.y : interior.bottom, interior.x : interior.right
                ] = 1.0
                _draw_chart(canvas, interior, rng)
                labels.append(MetaLabel.ILLUSTRATION)
        rects = list(cells)
    else:  # whiteband
        rects = []
        for cell in cells:
            content = _panel_content(spec, rng)
            if content == "noise":
                _draw_noise(canvas, cell, rng)
                labels.append(MetaLabel.NON_ILLUSTRATION)
            else:
                _draw_chart(canvas, cell, rng)
                labels.append(MetaLabel.ILLUSTRATION)
            rects.append(_ink_bbox(canvas, cell))
        if spec.markup_noise > 0.0:
            grid_top = cells[0].y
            grid_bottom = cells[-1].bottom
            x = margin
            for j in range(c - 1):
                x += cell_ws[j]
                if rng.random() < spec.markup_noise:
                    _draw_markup(
                        canvas,
                        Rect(x, grid_top, v_gaps[j], grid_bottom - grid_top),
                        rng,
                    )
                x += v_gaps[j]
    return canvas, rects, True, labels


def merge_corpora(root: str | Path, corpora: list[Corpus], save: bool = True) -> Corpus:
    """Merge corpora whose roots live under ``root`` into one corpus.

    Entry image paths are rewritten relative to the new root; image ids
    must be unique across the inputs.
    """
    root = Path(root)
    merged = Corpus(root=root)
    seen: set[str] = set()
    for corpus in corpora:
        for entry in corpus.entries:
            if entry.image_id in seen:
                raise DomainError(f"duplicate image_id {entry.image_id!r} in merge")
            seen.add(entry.image_id)
            rel = os.path.relpath(corpus.root / entry.image_path, root)
            merged.entries.append(
                CorpusEntry(
                    image_id=entry.image_id,
                    image_path=rel,
                    annotation=entry.annotation,
                    labels=entry.labels,
                    width=entry.width,
                    height=entry.height,
                )
            )
    if save:
        save_annotations(merged)
    return merged


def synth_generate(spec: SynthSpec, root: str | Path) -> Corpus:
    """Generate a corpus directory: PNG images plus exact annotations."""
    root = Path(root)
    (root / IMAGE_DIR_NAME).mkdir(parents=True, exist_ok=True)
    corpus = Corpus(root=root)
    for index in range(spec.count):
        img, rects, is_compound, labels = generate_figure(spec, index)
        image_id = f"{spec.separator_kind}-{index:04d}"
        rel_path = f"{IMAGE_DIR_NAME}/{image_id}.png"
        save_image(img, root / rel_path)
        corpus.entries.append(
            CorpusEntry(
                image_id=image_id,
                image_path=rel_path,
                annotation=FigureAnnotation(
                    image_id=image_id, rects=rects, is_compound=is_compound
                ),
                labels=labels,
                width=img.shape[1],
                height=img.shape[0],
            )
        )
    save_annotations(corpus)
    return corpus
