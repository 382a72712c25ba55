"""Parameter search: coordinate-wise hill climbing with candidate-grid
re-centering, plus an exhaustive two-point grid refinement step."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

from .errors import DomainError

Config = dict[str, float]
EvalFn = Callable[[Config], float]

BASE_MARKER = "(base)"
JOINT_MARKER = "(joint)"


@dataclass(frozen=True)
class TraceEntry:
    """One objective evaluation: which round, which parameter was being
    varied (or a marker for base/joint evaluations), the candidate value,
    and the achieved score."""

    round: int
    parameter: str
    value: float | str
    score: float


@dataclass
class SearchResult:
    params: Config
    score: float
    rounds: int
    evaluations: int
    ranking: list[str]
    trace: list[TraceEntry] = field(default_factory=list)


def _is_geometric(values: Sequence[float]) -> bool:
    """True when successive ratios are constant (within float slack)."""
    if len(values) < 3 or any(v <= 0 for v in values):
        return False
    ratios = [values[i + 1] / values[i] for i in range(len(values) - 1)]
    lo, hi = min(ratios), max(ratios)
    return hi - lo <= 1e-9 * max(1.0, abs(hi))


def recenter(candidates: Sequence[float], new_value: float) -> list[float]:
    """Shift a candidate grid so its middle element lands on ``new_value``.

    Geometric progressions are rescaled multiplicatively, everything else
    additively; spacing between candidates is preserved either way.
    """
    values = sorted(set(candidates))
    if len(values) < 2:
        return [new_value]
    mid = values[len(values) // 2]
    if _is_geometric(values):
        if new_value <= 0:
            shifted = [v + (new_value - mid) for v in values]
        else:
            factor = new_value / mid
            shifted = [v * factor for v in values]
    else:
        shifted = [v + (new_value - mid) for v in values]
    if all(isinstance(v, int) for v in candidates) and all(
        abs(v - round(v)) < 1e-9 for v in shifted
    ):
        shifted = [int(round(v)) for v in shifted]
    out = sorted(set(shifted))
    return out


def hill_climb(
    space: dict[str, Sequence[float]],
    eval_fn: EvalFn,
    initial: Config,
    stop_delta: float = 5.0,
    max_rounds: int = 25,
) -> SearchResult:
    """Coordinate-wise parameter search.

    Each round evaluates every candidate of every free parameter against
    the current configuration, adopts the per-parameter best values
    jointly, then re-centers the candidate grids of parameters that moved
    and freezes the ones that did not.  The search stops once the
    round-over-round improvement of the best observed score drops to
    ``stop_delta`` points or below.  The returned configuration is the
    best one actually evaluated, so it never scores below the initial
    configuration.
    """
    names = list(space.keys())
    if not names:
        raise DomainError("empty search space")
    for name in names:
        if not space[name]:
            raise DomainError(f"no candidates for parameter {name!r}")
        if name not in initial:
            raise DomainError(f"initial value missing for parameter {name!r}")
    grids: dict[str, list[float]] = {n: list(space[n]) for n in names}
    for name in names:
        if initial[name] not in grids[name]:
            raise DomainError(
                f"initial value {initial[name]!r} not among candidates for {name!r}"
            )

    cache: dict[tuple, float] = {}
    trace: list[TraceEntry] = []
    evaluations = 0

    def ev(cfg: Config, round_no: int, parameter: str, value) -> float:
        nonlocal evaluations
        key = tuple(cfg[n] for n in names)
        if key not in cache:
            cache[key] = float(eval_fn(dict(cfg)))
            evaluations += 1
        score = cache[key]
        trace.append(TraceEntry(round_no, parameter, value, score))
        return score

    current = {n: initial[n] for n in names}
    best_score = ev(current, 0, BASE_MARKER, "")
    ranking = list(names)
    rounds = 0

    for round_no in range(1, max_rounds + 1):
        rounds = round_no
        before = best_score
        base = ev(current, round_no, BASE_MARKER, "")
        per_param_best: dict[str, float] = {}
        adopted: Config = {}
        for name in names:
            best_value, best_local = current[name], base
            seen_best = base
            for value in grids[name]:
                if value == current[name]:
                    score = base
                else:
                    score = ev({**current, name: value}, round_no, name, value)
                seen_best = max(seen_best, score)
                if score > best_local:
                    best_value, best_local = value, score
            per_param_best[name] = seen_best
            adopted[name] = best_value
            best_score = max(best_score, seen_best)
        changed = [n for n in names if adopted[n] != current[n]]
        current = adopted
        if changed:
            joint = ev(current, round_no, JOINT_MARKER, "")
            best_score = max(best_score, joint)
        ranking = sorted(
            names, key=lambda n: (-per_param_best[n], names.index(n))
        )
        for name in names:
            if name in changed:
                grids[name] = recenter(grids[name], current[name])
            else:
                grids[name] = [current[name]]
        if best_score - before <= stop_delta:
            break

    best_key = max(cache, key=lambda k: cache[k])
    best_cfg = {n: v for n, v in zip(names, best_key)}
    return SearchResult(
        params=best_cfg,
        score=cache[best_key],
        rounds=rounds,
        evaluations=evaluations,
        ranking=ranking,
        trace=trace,
    )


def grid_refine(
    params: Config,
    values: dict[str, tuple[float, float]],
    eval_fn: EvalFn,
) -> SearchResult:
    """Exhaustive search over two candidate values per listed parameter.

    Evaluates exactly ``2 ** len(values)`` configurations; ties go to the
    first combination in lexicographic parameter order.
    """
    names = sorted(values.keys())
    for name in names:
        if len(values[name]) != 2:
            raise DomainError(f"need exactly two values for parameter {name!r}")
    trace: list[TraceEntry] = []
    best_cfg: Config | None = None
    best_score = -math.inf
    evaluations = 0
    for combo in product(*(values[n] for n in names)):
        cfg = dict(params)
        cfg.update(dict(zip(names, combo)))
        score = float(eval_fn(dict(cfg)))
        evaluations += 1
        trace.append(TraceEntry(0, JOINT_MARKER, repr(combo), score))
        if score > best_score:
            best_cfg, best_score = cfg, score
    assert best_cfg is not None
    return SearchResult(
        params=best_cfg,
        score=best_score,
        rounds=1,
        evaluations=evaluations,
        ranking=list(names),
        trace=trace,
    )


def top_values(
    trace: Sequence[TraceEntry], names: Sequence[str]
) -> dict[str, tuple[float, float]]:
    """Best two observed values per named parameter, by achieved score."""
    out: dict[str, tuple[float, float]] = {}
    for name in names:
        scored: dict[float, float] = {}
        for entry in trace:
            if entry.parameter == name:
                value = entry.value
                scored[value] = max(scored.get(value, -math.inf), entry.score)
        if len(scored) >= 2:
            ordered = sorted(scored.items(), key=lambda kv: -kv[1])
            out[name] = (ordered[0][0], ordered[1][0])
    return out


def write_trace_csv(trace: Sequence[TraceEntry], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "parameter", "value", "score"])
        for entry in trace:
            writer.writerow([entry.round, entry.parameter, entry.value, entry.score])
