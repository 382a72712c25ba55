"""Tests for parameter search: grid re-centering, coordinate-wise hill
climbing with its evaluation budget, and exhaustive two-point refinement."""

import csv
import itertools

import pytest

from figsep.errors import DomainError
from figsep.tune import (
    SearchResult,
    TraceEntry,
    grid_refine,
    hill_climb,
    recenter,
    top_values,
    write_trace_csv,
)


# ---------------------------------------------------------------------------
# recenter
# ---------------------------------------------------------------------------


class TestRecenter:
    def test_geometric_grid_rescales(self):
        assert recenter([1, 2, 4], 8) == [4, 8, 16]

    def test_geometric_fractional_grid(self):
        out = recenter([0.05, 0.1, 0.2], 0.4)
        assert out == pytest.approx([0.2, 0.4, 0.8])

    def test_additive_grid_shifts(self):
        assert recenter([10, 20, 30], 50) == [40, 50, 60]

    def test_integer_grids_stay_integer(self):
        out = recenter([1, 2, 4], 8)
        assert all(isinstance(v, int) for v in out)

    def test_non_integer_target_produces_floats(self):
        out = recenter([1, 2, 4], 3)
        assert out == pytest.approx([1.5, 3.0, 6.0])

    def test_geometric_grid_with_nonpositive_target_shifts(self):
        assert recenter([1, 2, 4], 0) == [-1, 0, 2]

    def test_single_value_collapses_to_target(self):
        assert recenter([5], 9) == [9]

    def test_two_value_grid_shifts_around_upper_middle(self):
        # With an even count the middle element is the upper median.
        assert recenter([0, 10], 10) == [0, 10]
        assert recenter([0, 10], 20) == [10, 20]

    def test_result_sorted_and_unique(self):
        out = recenter([30, 10, 20, 20], 20)
        assert out == [10, 20, 30]


# ---------------------------------------------------------------------------
# hill_climb: frozen two-parameter scenario
# ---------------------------------------------------------------------------


def quadratic(cfg):
    """Separable concave objective peaking at a=2, b=10."""
    return 100 - 10 * (cfg["a"] - 2) ** 2 - 0.1 * (cfg["b"] - 10) ** 2


SPACE = {"a": [0, 1, 2], "b": [0, 10]}
INITIAL = {"a": 0, "b": 0}


class TestHillClimbFrozenScenario:
    @pytest.fixture()
    def result(self):
        return hill_climb(SPACE, quadratic, INITIAL, stop_delta=5.0)

    def test_finds_the_peak(self, result):
        assert result.params == {"a": 2, "b": 10}
        assert result.score == 100.0

    def test_round_and_evaluation_counts(self, result):
        # Round 1 adopts (2, 10); round 2 confirms no better neighbour.
        assert result.rounds == 2
        # 1 base + 4 fresh configs in round 1 + 2 in round 2; repeats hit
        # the cache and are not billed.
        assert result.evaluations == 7

    def test_trace_is_the_full_evaluation_log(self, result):
        assert len(result.trace) == 10
        assert result.trace[0] == TraceEntry(0, "(base)", "", 50.0)
        assert result.trace[5] == TraceEntry(1, "(joint)", "", 100.0)
        assert [t.round for t in result.trace] == [0, 1, 1, 1, 1, 1, 2, 2, 2, 2]

    def test_sweep_skips_the_current_value(self, result):
        round1_a = [t.value for t in result.trace if t.round == 1 and t.parameter == "a"]
        assert round1_a == [1, 2]  # current value 0 is not re-evaluated

    def test_ranking_breaks_ties_by_name_order(self, result):
        # In the final round both parameters top out at the base score.
        assert result.ranking == ["a", "b"]

    def test_cached_objective_never_reevaluated(self):
        seen = []

        def spy(cfg):
            key = (cfg["a"], cfg["b"])
            assert key not in seen, f"config {key} evaluated twice"
            seen.append(key)
            return quadratic(cfg)

        res = hill_climb(SPACE, spy, INITIAL, stop_delta=5.0)
        assert res.evaluations == len(seen) == 7

    def test_deterministic(self):
        a = hill_climb(SPACE, quadratic, INITIAL, stop_delta=5.0)
        b = hill_climb(SPACE, quadratic, INITIAL, stop_delta=5.0)
        assert a == b


# ---------------------------------------------------------------------------
# hill_climb: contract properties
# ---------------------------------------------------------------------------


class TestHillClimbContract:
    def test_never_returns_worse_than_initial(self):
        def hostile(cfg):
            # Initial config is the global optimum.
            return -abs(cfg["x"])

        res = hill_climb({"x": [0, 1, 2]}, hostile, {"x": 0}, stop_delta=0.0)
        assert res.params == {"x": 0}
        assert res.score == 0.0

    def test_budget_bound(self):
        space = {
            "a": [0, 1, 2, 3],
            "b": [0, 5, 10],
            "c": [1, 2, 4],
        }

        def f(cfg):
            return -((cfg["a"] - 2) ** 2) - (cfg["b"] - 5) ** 2 - (cfg["c"] - 2) ** 2

        res = hill_climb(space, f, {"a": 0, "b": 0, "c": 1}, stop_delta=0.0)
        per_round = sum(len(v) for v in space.values())
        assert res.evaluations <= 1 + res.rounds * per_round

    def test_stop_delta_boundary_is_inclusive(self):
        scores = {0: 50.0, 1: 55.0, 2: 60.0, 3: 65.0}

        def f(cfg):
            return scores.get(cfg["a"], 65.0)

        # Round 1 improves by 10 (continue); round 2 improves by exactly
        # stop_delta=5, which stops the search.
        res = hill_climb({"a": [0, 1, 2]}, f, {"a": 0}, stop_delta=5.0)
        assert res.rounds == 2
        assert res.params == {"a": 3}  # found via the re-centered grid
        assert res.score == 65.0

    def test_max_rounds_caps_the_search(self):
        def f(cfg):
            return float(cfg["a"])

        res = hill_climb(
            {"a": [0, 1, 2]}, f, {"a": 0}, stop_delta=-1.0, max_rounds=3
        )
        assert res.rounds == 3

    def test_unchanged_parameters_freeze_to_single_candidate(self):
        calls = []

        def f(cfg):
            calls.append((cfg["a"], cfg["b"]))
            return -((cfg["a"] - 2) ** 2)  # b has no effect

        hill_climb(
            {"a": [0, 1, 2], "b": [0, 1]}, f, {"a": 0, "b": 0}, stop_delta=0.0
        )
        # After round 1, b froze at 0: no later call may move it.
        later_b = {b for _, b in calls}
        assert later_b == {0, 1} or later_b == {0}
        round2_plus = calls[5:]
        assert all(b == 0 for _, b in round2_plus)

    @pytest.mark.parametrize(
        "space, initial, message",
        [
            ({}, {}, "empty search space"),
            ({"a": []}, {"a": 0}, "no candidates"),
            ({"a": [0, 1]}, {}, "initial value missing"),
            ({"a": [0, 1]}, {"a": 7}, "not among candidates"),
        ],
    )
    def test_validation(self, space, initial, message):
        with pytest.raises(DomainError, match=message):
            hill_climb(space, lambda cfg: 0.0, initial)


# ---------------------------------------------------------------------------
# grid_refine
# ---------------------------------------------------------------------------


class TestGridRefine:
    def test_evaluates_every_combination_exactly_once(self):
        calls = []

        def f(cfg):
            calls.append((cfg["a"], cfg["b"], cfg["c"]))
            return cfg["a"] + cfg["b"] + cfg["c"]

        res = grid_refine(
            {"a": 0, "b": 0, "c": 0, "d": 9},
            {"a": (0, 1), "b": (0, 2), "c": (0, 4)},
            f,
        )
        assert res.evaluations == 8
        assert len(calls) == len(set(calls)) == 8
        assert res.params == {"a": 1, "b": 2, "c": 4, "d": 9}
        assert res.score == 7

    def test_untouched_parameters_pass_through(self):
        res = grid_refine({"a": 0, "keep": 3.5}, {"a": (0, 1)}, lambda c: c["a"])
        assert res.params["keep"] == 3.5

    def test_ties_keep_the_first_combination(self):
        res = grid_refine({"a": 0, "b": 0}, {"a": (0, 1), "b": (0, 1)}, lambda c: 0.0)
        assert res.params == {"a": 0, "b": 0}

    def test_names_processed_in_sorted_order(self):
        order = []

        def f(cfg):
            order.append((cfg["x"], cfg["y"]))
            return 0.0

        grid_refine({"x": 0, "y": 0}, {"y": (0, 1), "x": (0, 1)}, f)
        assert order == list(itertools.product((0, 1), (0, 1)))

    def test_requires_exactly_two_values(self):
        with pytest.raises(DomainError):
            grid_refine({"a": 0}, {"a": (0, 1, 2)}, lambda c: 0.0)
        with pytest.raises(DomainError):
            grid_refine({"a": 0}, {"a": (0,)}, lambda c: 0.0)

    def test_returns_search_result(self):
        res = grid_refine({"a": 0}, {"a": (0, 1)}, lambda c: c["a"])
        assert isinstance(res, SearchResult)
        assert res.rounds == 1
        assert len(res.trace) == 2


# ---------------------------------------------------------------------------
# top_values and the trace file
# ---------------------------------------------------------------------------


class TestTopValues:
    def test_best_two_values_per_parameter(self):
        res = hill_climb(SPACE, quadratic, INITIAL, stop_delta=5.0)
        tops = top_values(res.trace, ["a", "b"])
        # A value is scored by the best score ever observed with it, across
        # rounds.  a=1 reaches 90 in round 2 (with b already at 10), tying
        # a=2 and a=3; first-seen order breaks the tie in favour of 1, 2.
        assert tops["a"] == (1, 2)
        # b=0 was re-visited in round 2 alongside a=2, scoring 90 > 60.
        assert tops["b"] == (0, 10)

    def test_parameters_with_one_observed_value_are_omitted(self):
        trace = [TraceEntry(1, "a", 3, 10.0), TraceEntry(1, "a", 3, 12.0)]
        assert top_values(trace, ["a"]) == {}

    def test_markers_are_ignored(self):
        trace = [
            TraceEntry(0, "(base)", "", 99.0),
            TraceEntry(1, "a", 1, 10.0),
            TraceEntry(1, "a", 2, 20.0),
            TraceEntry(1, "(joint)", "", 99.0),
        ]
        assert top_values(trace, ["a"]) == {"a": (2, 1)}


class TestTraceCsv:
    def test_round_trips_through_csv(self, tmp_path):
        res = hill_climb(SPACE, quadratic, INITIAL, stop_delta=5.0)
        path = tmp_path / "trace.csv"
        write_trace_csv(res.trace, str(path))
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["round", "parameter", "value", "score"]
        assert len(rows) == 1 + len(res.trace)
        assert rows[1] == ["0", "(base)", "", "50.0"]
        assert rows[2] == ["1", "(base)", "", "50.0"]
        assert rows[4] == ["1", "a", "2", "90.0"]
