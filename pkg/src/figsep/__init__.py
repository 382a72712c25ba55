"""figsep: compound figure classification and separation.

The package detects whether an article image stitches several sub-figures
together, splits compound figures into sub-figure rectangles by finding
separator lines (uniform bands in graph-like images, long edges in
photograph-like images), and scores the results under two evaluation
protocols.
"""

from .cfs import SeparationResult, Variant, remove_border_bands, separate
from .band_sep import detect_band_separators
from .data import (
    Corpus,
    CorpusEntry,
    FigureAnnotation,
    SynthSpec,
    load_corpus,
    load_results,
    merge_corpora,
    save_annotations,
    save_results,
    synth_generate,
)
from .edge_sep import detect_edge_separators
from .errors import (
    AlignmentError,
    DegenerateTrainingSet,
    DomainError,
    FigsepError,
    InputTooSmall,
    InvalidImage,
    MissingAsset,
    NoSeparators,
    ParseError,
    ShapeError,
)
from .evaluation import (
    EvalReport,
    chain_evaluate,
    evaluate_separations,
    imageclef_score,
    nlm_aggregate,
    nlm_true_positives,
)
from .features import (
    FeatureSetSpec,
    QuantizationParams,
    extract_cfc_features,
    load_features,
    save_features,
)
from .illustration import (
    IlluModel,
    MappingStrategy,
    MetaLabel,
    Routing,
    load_illu_model,
    map_labels,
    route,
    save_illu_model,
    simple2,
    simple11,
)
from .learn import (
    LinearModel,
    LossMatrix,
    classifier_metrics,
    decide,
    load_model,
    predict_label,
    predict_proba,
    save_model,
    train_linear_svm,
    train_logreg,
)
from .params import CfsParams
from .pipeline import (
    classify_features,
    corpus_features,
    run_chain,
    separate_corpus,
)
from .raster import (
    Direction,
    Rect,
    SeparatorLine,
    Stat,
    crop,
    intersect,
    load_image,
    save_image,
    to_grayscale,
)
from .tune import SearchResult, grid_refine, hill_climb, recenter

__version__ = "1.0.0"

__all__ = [
    "AlignmentError",
    "CfsParams",
    "Corpus",
    "CorpusEntry",
    "DegenerateTrainingSet",
    "Direction",
    "DomainError",
    "EvalReport",
    "FeatureSetSpec",
    "FigsepError",
    "FigureAnnotation",
    "IlluModel",
    "InputTooSmall",
    "InvalidImage",
    "LinearModel",
    "LossMatrix",
    "MappingStrategy",
    "MetaLabel",
    "MissingAsset",
    "NoSeparators",
    "ParseError",
    "QuantizationParams",
    "Rect",
    "Routing",
    "SearchResult",
    "SeparationResult",
    "SeparatorLine",
    "ShapeError",
    "Stat",
    "SynthSpec",
    "Variant",
    "chain_evaluate",
    "classifier_metrics",
    "classify_features",
    "corpus_features",
    "crop",
    "decide",
    "detect_band_separators",
    "detect_edge_separators",
    "evaluate_separations",
    "extract_cfc_features",
    "grid_refine",
    "hill_climb",
    "imageclef_score",
    "intersect",
    "load_corpus",
    "load_features",
    "load_illu_model",
    "load_image",
    "load_model",
    "load_results",
    "map_labels",
    "merge_corpora",
    "nlm_aggregate",
    "nlm_true_positives",
    "predict_label",
    "predict_proba",
    "recenter",
    "remove_border_bands",
    "route",
    "run_chain",
    "save_annotations",
    "save_features",
    "save_illu_model",
    "save_image",
    "save_model",
    "save_results",
    "separate",
    "separate_corpus",
    "simple2",
    "simple11",
    "synth_generate",
    "to_grayscale",
    "train_linear_svm",
    "train_logreg",
]
