"""Tunable parameters of the recursive separation engine.

Two presets ship with the package: ``optimal`` (the default constructor
values, found by tuning) and ``initial`` (the untuned starting point).
Fractional parameters are expressed relative to the sub-image extent in the
relevant direction; see the individual field comments.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .errors import DomainError, ParseError

_CLASSIFIER_MODELS = ("first", "majority", "unanimous", "greedy")


@dataclass(frozen=True)
class CfsParams:
    # Routing classifier: label-mapping strategy of the model to apply, and
    # the illustration-probability threshold above which band analysis runs.
    classifier_model: str = "greedy"
    decision_threshold: float = 0.1
    # Minimum sub-image extent (orthogonal to the candidate lines) for a
    # direction to be searched at all, in pixels.
    mindim: int = 200
    # Bounding boxes smaller than this fraction of the original image area
    # are discarded.
    elim_area: float = 0.03

    # Edge-based detection.
    edge_maxdepth: int = 10
    edge_sobelthresh: float = 0.02
    edge_houghratio_min: float = 0.2
    edge_houghratio_base: float = 1.5
    edge_maxdistvar: float = 0.1
    edge_gapratio: float = 0.3
    edge_lenratio: float = 0.03
    edge_minseplength: float = 0.5
    edge_minborderdist: float = 0.05

    # Band-based detection.
    band_maxdepth: int = 4
    band_minsepwidth: float = 0.0001
    band_maxdistvar: float = 0.2
    band_minborderdist: float = 0.01

    def __post_init__(self):
        if self.classifier_model not in _CLASSIFIER_MODELS:
            raise DomainError(
                f"classifier_model must be one of {_CLASSIFIER_MODELS}"
            )
        if not 0.0 <= self.decision_threshold <= 1.0:
            raise DomainError("decision_threshold must lie in [0, 1]")
        if self.mindim < 0:
            raise DomainError("mindim must be non-negative")
        if self.elim_area < 0:
            raise DomainError("elim_area must be non-negative")
        if self.edge_maxdepth < 0 or self.band_maxdepth < 0:
            raise DomainError("recursion depth limits must be non-negative")
        if self.edge_houghratio_min <= 0:
            raise DomainError("edge_houghratio_min must be positive")
        if self.edge_houghratio_base < 1.0:
            raise DomainError("edge_houghratio_base must be >= 1")
        for name in (
            "edge_sobelthresh",
            "edge_maxdistvar",
            "edge_gapratio",
            "edge_lenratio",
            "edge_minseplength",
            "edge_minborderdist",
            "band_minsepwidth",
            "band_maxdistvar",
            "band_minborderdist",
        ):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")

    @classmethod
    def optimal(cls) -> "CfsParams":
        return cls()

    @classmethod
    def initial(cls) -> "CfsParams":
        return cls(
            classifier_model="first",
            decision_threshold=0.5,
            mindim=50,
            elim_area=0.0,
            edge_maxdepth=10,
            edge_sobelthresh=0.05,
            edge_houghratio_min=0.25,
            edge_houghratio_base=1.2,
            edge_maxdistvar=0.0001,
            edge_gapratio=0.2,
            edge_lenratio=0.05,
            edge_minseplength=0.7,
            edge_minborderdist=0.1,
            band_maxdepth=2,
            band_minsepwidth=0.03,
            band_maxdistvar=0.0003,
            band_minborderdist=0.1,
        )

    def to_json(self) -> dict:
        return asdict(self)

    def with_updates(self, **kwargs) -> "CfsParams":
        return replace(self, **kwargs)

    @classmethod
    def from_json(cls, obj: dict) -> "CfsParams":
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ParseError(f"unknown parameter names: {sorted(unknown)}")
        return cls().with_updates(**obj)

    @classmethod
    def from_file(cls, path: str | Path) -> "CfsParams":
        """Load a preset name ("optimal", "initial") or a JSON file with a
        partial parameter mapping layered over the optimal defaults."""
        text = str(path)
        if text == "optimal":
            return cls.optimal()
        if text == "initial":
            return cls.initial()
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid parameter JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ParseError("parameter file must hold a JSON object")
        return cls.from_json(obj)
