"""Edge-based separator detection tests."""

import numpy as np
import pytest

from figsep.edge_sep import (
    FRAME,
    HoughContext,
    add_artificial_border,
    detect_edge_separators,
    peak_threshold,
)
from figsep.params import CfsParams
from figsep.raster import Direction

OPT = CfsParams.optimal()


def step_image(h=50, w=60, split=30, low=0.2, high=0.8):
    img = np.full((h, w), low)
    img[:, split:] = high
    return img


class TestPeakThreshold:
    def test_zero_fill_uses_base_ratio(self):
        ctx = HoughContext(depth=0, peak_max=100.0, fill_ratio=0.0)
        assert peak_threshold(ctx, 0.2, 1.5) == pytest.approx(20.0, abs=1e-9)

    def test_full_fill_saturates(self):
        ctx = HoughContext(depth=0, peak_max=100.0, fill_ratio=1.0)
        assert peak_threshold(ctx, 0.2, 1.5) == pytest.approx(100.0, abs=1e-9)

    def test_depth_and_fill_combined(self):
        ctx = HoughContext(depth=2, peak_max=100.0, fill_ratio=0.25)
        assert peak_threshold(ctx, 0.2, 1.5) == pytest.approx(72.5, abs=1e-9)

    def test_ratio_clamped_at_one(self):
        deep = HoughContext(depth=50, peak_max=100.0, fill_ratio=0.0)
        assert peak_threshold(deep, 0.2, 1.5) == pytest.approx(100.0, abs=1e-9)

    def test_monotone_in_depth(self):
        values = [
            peak_threshold(HoughContext(d, 100.0, 0.1), 0.2, 1.5) for d in range(8)
        ]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            HoughContext(depth=-1, peak_max=10.0, fill_ratio=0.0)
        with pytest.raises(ValueError):
            HoughContext(depth=0, peak_max=10.0, fill_ratio=1.5)


class TestArtificialBorder:
    def test_geometry(self):
        img = np.full((5, 7), 0.5)
        out = add_artificial_border(img)
        assert out.shape == (5 + 2 * FRAME, 7 + 2 * FRAME)
        # Outer ring is black, the ring inside it white.
        assert out[0].tolist() == [0.0] * 11
        assert out[-1].tolist() == [0.0] * 11
        assert out[:, 0].tolist() == [0.0] * 9
        assert out[1, 1:-1].tolist() == [1.0] * 9
        assert out[1:-1, 1].tolist() == [1.0] * 7
        # Original content is preserved in the middle.
        assert np.array_equal(out[FRAME:-FRAME, FRAME:-FRAME], img)


class TestDetect:
    def test_full_height_step(self):
        lines = detect_edge_separators(step_image(), Direction.VERTICAL, 0, OPT)
        assert [ln.position for ln in lines] == [29]
        assert lines[0].direction is Direction.VERTICAL

    def test_no_horizontal_lines_in_vertical_step(self):
        assert detect_edge_separators(step_image(), Direction.HORIZONTAL, 0, OPT) == []

    def test_uniform_image(self):
        img = np.full((50, 60), 0.5)
        assert detect_edge_separators(img, Direction.VERTICAL, 0, OPT) == []

    def test_depth_raises_the_bar(self):
        # A step spanning only the top 30 of 50 rows survives shallow
        # recursion but falls below the adaptive threshold deeper down.
        img = np.full((50, 60), 0.2)
        img[:30, 30:] = 0.8
        for depth, expect in [(0, [29]), (2, [29]), (3, []), (5, [])]:
            lines = detect_edge_separators(img, Direction.VERTICAL, depth, OPT)
            assert [ln.position for ln in lines] == expect, f"depth {depth}"

    def test_gap_consolidation(self):
        # The step pauses for 7 rows mid-image; the default gap ratio
        # bridges it, a small one does not.
        img = step_image()
        img[21:28, :] = 0.5
        assert [
            ln.position
            for ln in detect_edge_separators(img, Direction.VERTICAL, 0, OPT)
        ] == [29]
        strict = OPT.with_updates(edge_gapratio=0.05)
        assert detect_edge_separators(img, Direction.VERTICAL, 0, strict) == []

    def test_min_span_filter(self):
        # Raising the minimum separator length above the image height
        # rejects even a full-height step.
        strict = OPT.with_updates(edge_minseplength=1.1)
        assert detect_edge_separators(step_image(), Direction.VERTICAL, 0, strict) == []

    def test_border_distance_filter(self):
        img = step_image(split=2)
        assert detect_edge_separators(img, Direction.VERTICAL, 0, OPT) == []

    def test_empty_image(self):
        assert detect_edge_separators(np.zeros((0, 5)), Direction.VERTICAL, 0, OPT) == []

    def test_two_steps(self):
        img = np.full((50, 90), 0.2)
        img[:, 30:60] = 0.8
        img[:, 60:] = 0.3
        lines = detect_edge_separators(img, Direction.VERTICAL, 0, OPT)
        assert [ln.position for ln in lines] == [29, 59]
