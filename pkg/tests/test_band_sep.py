"""White-band separator detection tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from figsep.band_sep import detect_band_separators, max_runs, prune_irregular
from figsep.params import CfsParams
from figsep.raster import Direction

OPT = CfsParams.optimal()


class TestMaxRuns:
    def test_frozen_oracle(self):
        assert max_runs([0, 1, 1, 0, 1]) == [(1, 2), (4, 1)]

    def test_all_false(self):
        assert max_runs([0, 0, 0]) == []

    def test_all_true(self):
        assert max_runs([1, 1, 1, 1]) == [(0, 4)]

    def test_empty(self):
        assert max_runs([]) == []

    def test_single_elements(self):
        assert max_runs([1]) == [(0, 1)]
        assert max_runs([0]) == []

    @given(bits=st.lists(st.booleans(), max_size=64))
    @settings(max_examples=150)
    def test_round_trip_reconstruction(self, bits):
        runs = max_runs(bits)
        rebuilt = [False] * len(bits)
        for start, length in runs:
            assert length >= 1
            for i in range(start, start + length):
                assert not rebuilt[i]  # runs are disjoint
                rebuilt[i] = True
        assert rebuilt == [bool(b) for b in bits]
        # runs are maximal: flanked by False or the array edge
        for start, length in runs:
            assert start == 0 or not bits[start - 1]
            end = start + length
            assert end == len(bits) or not bits[end]


class TestPruneIrregular:
    def test_regular_set_kept(self):
        assert prune_irregular([25, 50, 60, 75], [9, 9, 1, 9], 100, 0.005) == [
            25,
            50,
            60,
            75,
        ]

    def test_weakest_dropped_until_regular(self):
        assert prune_irregular([25, 50, 60, 75], [9, 9, 1, 9], 100, 0.003) == [
            25,
            50,
            75,
        ]

    def test_cascade_keeps_strongest(self):
        assert prune_irregular([10, 20, 90], [3, 2, 1], 100, 1e-6) == [10]

    def test_lone_candidate_admissible(self):
        assert prune_irregular([70], [1.0], 100, 0.0) == [70]

    def test_empty(self):
        assert prune_irregular([], [], 100, 0.0) == []

    def test_result_sorted(self):
        out = prune_irregular([75, 25, 50], [1, 2, 3], 100, 1.0)
        assert out == [25, 50, 75]


class TestDetect:
    def test_single_band_center(self):
        # Dark panels split by a 20 px white band at columns 90..109; the
        # separator is the band center.
        img = np.full((40, 200), 0.2)
        img[:, 90:110] = 1.0
        lines = detect_band_separators(img, Direction.VERTICAL, OPT)
        assert [ln.position for ln in lines] == [99]
        assert lines[0].direction is Direction.VERTICAL

    def test_no_horizontal_bands_in_vertical_layout(self):
        img = np.full((40, 200), 0.2)
        img[:, 90:110] = 1.0
        assert detect_band_separators(img, Direction.HORIZONTAL, OPT) == []

    def test_min_width_filter(self):
        img = np.full((40, 200), 0.2)
        img[:, 95:97] = 1.0
        assert [
            ln.position for ln in detect_band_separators(img, Direction.VERTICAL, OPT)
        ] == [95]
        wide = OPT.with_updates(band_minsepwidth=0.03)  # 6 px minimum
        assert detect_band_separators(img, Direction.VERTICAL, wide) == []

    def test_border_distance_filter(self):
        img = np.full((40, 200), 0.2)
        img[:, 4:7] = 1.0
        assert [
            ln.position for ln in detect_band_separators(img, Direction.VERTICAL, OPT)
        ] == [5]
        strict = OPT.with_updates(band_minborderdist=0.1)
        assert detect_band_separators(img, Direction.VERTICAL, strict) == []

    def test_tiny_extent_returns_nothing(self):
        assert detect_band_separators(np.ones((5, 2)), Direction.VERTICAL, OPT) == []

    def test_uniform_image_single_full_run(self):
        # Every pixel sits at the mean, so the whole extent is one white
        # run whose center (40 - 1) // 2 = 19 is reported.
        img = np.full((40, 40), 0.5)
        lines = detect_band_separators(img, Direction.VERTICAL, OPT)
        assert [ln.position for ln in lines] == [19]

    def test_two_bands(self):
        img = np.full((40, 300), 0.2)
        img[:, 90:110] = 1.0
        img[:, 190:210] = 1.0
        lines = detect_band_separators(img, Direction.VERTICAL, OPT)
        assert [ln.position for ln in lines] == [99, 199]
