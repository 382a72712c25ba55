"""Command line interface.

Exit codes: 0 on success, 1 for usage errors, 2 for data errors (malformed
files, missing assets, inconsistent inputs).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .cfs import Variant
from .data import (
    FigureAnnotation,
    SynthSpec,
    load_corpus,
    load_results,
    save_results,
    synth_generate,
)
from .errors import DomainError, FigsepError
from .evaluation import chain_evaluate, evaluate_separations
from .features import (
    FeatureSetSpec,
    QuantizationParams,
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
    save_illu_model,
    simple2,
    simple11,
)
from .learn import (
    LossMatrix,
    classifier_metrics,
    load_model,
    save_model,
    train_linear_svm,
    train_logreg,
)
from .params import CfsParams
from .pipeline import (
    classify_features,
    corpus_features,
    resolve_workers,
    run_chain,
    separate_corpus,
)
from .raster import load_image
from .tune import (
    grid_refine,
    hill_climb,
    top_values,
    write_trace_csv,
)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _routing_args(args, parser: _Parser):
    """Resolve the detector routing flags to (illu_model, forced_routing)."""
    if args.routing and args.illu:
        parser.error("--routing and --illu are mutually exclusive")
    if args.routing:
        return None, Routing(args.routing)
    if args.illu:
        return load_illu_model(args.illu), None
    return None, None


def _overlay_image(img: np.ndarray, rects) -> np.ndarray:
    """RGB copy of a grayscale image with rectangle outlines drawn in."""
    base = (np.clip(img, 0.0, 1.0) * 255.0).round().astype(np.uint8)
    rgb = np.stack([base, base, base], axis=-1)
    color = np.array([36, 200, 64], dtype=np.uint8)
    for r in rects:
        t = 2
        rgb[r.y : min(r.y + t, r.bottom), r.x : r.right] = color
        rgb[max(r.bottom - t, r.y) : r.bottom, r.x : r.right] = color
        rgb[r.y : r.bottom, r.x : min(r.x + t, r.right)] = color
        rgb[r.y : r.bottom, max(r.right - t, r.x) : r.right] = color
    return rgb


# ---------------------------------------------------------------------------
# Subcommand implementations.


def _cmd_synth(args, parser) -> int:
    obj = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.count is not None:
        obj["count"] = args.count
    spec = SynthSpec.from_json(obj)
    corpus = synth_generate(spec, args.out)
    print(f"wrote {len(corpus)} figures to {args.out}")
    return 0


def _cmd_features(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    spec = FeatureSetSpec.parse(args.set, args.k)
    qparams = QuantizationParams(p=args.p, q=args.q, h=args.h)
    workers = resolve_workers(args.workers)
    ids, X = corpus_features(corpus, spec, qparams, workers=workers)
    records = [
        {"id": image_id, "spec": spec.code, "k": spec.k, "values": row}
        for image_id, row in zip(ids, X)
    ]
    save_features(args.out, records)
    print(f"wrote {len(records)} feature vectors ({X.shape[1]} dims) to {args.out}")
    return 0


def _load_feature_matrix(path) -> tuple[list[str], np.ndarray, str, int]:
    records = load_features(path)
    if not records:
        raise DomainError(f"feature file {path} is empty")
    codes = {rec["spec"] for rec in records}
    ks = {rec["k"] for rec in records}
    if len(codes) > 1 or len(ks) > 1:
        raise DomainError("feature file mixes feature set specs")
    ids = [rec["id"] for rec in records]
    X = np.vstack([rec["values"] for rec in records])
    return ids, X, codes.pop(), ks.pop()


def _cmd_train_cfc(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    ids, X, code, k = _load_feature_matrix(args.features)
    y = np.array(
        [1 if corpus.get(i).annotation.is_compound else 0 for i in ids],
        dtype=np.int64,
    )
    meta = {
        "task": "cfc",
        "spec": code,
        "k": k,
        "p": args.p,
        "q": args.q,
        "h": args.h,
    }
    if args.algo == "logreg":
        model = train_logreg(
            X, y, l2=args.l2, epochs=args.epochs,
            learning_rate=args.learning_rate, metadata=meta,
        )
    else:
        model = train_linear_svm(X, y, c=args.c, epochs=args.epochs, metadata=meta)
    save_model(model, args.out)
    metrics = classifier_metrics(
        [1 if model.decision_values(x)[0] >= 0 else 0 for x in X], y
    )
    print(
        f"trained {args.algo} on {len(ids)} images; training accuracy "
        f"{metrics['accuracy_pct']:.1f}%"
    )
    return 0


def _cmd_train_illu(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    strategy = MappingStrategy(args.strategy)
    rows, labels = [], []
    for entry in corpus:
        if not entry.labels:
            continue
        mapped = map_labels(entry.labels, strategy)
        if mapped is None:
            continue
        img = load_image(corpus.image_file(entry))
        feats = simple_features(img, args.feature_kind)
        rows.append(feats)
        labels.append(1 if mapped is MetaLabel.ILLUSTRATION else 0)
    if not rows:
        raise DomainError("no labelled images usable for training")
    X = np.vstack(rows)
    y = np.asarray(labels, dtype=np.int64)
    meta = {"task": "illustration", "features": args.feature_kind}
    if args.algo == "logreg":
        inner = train_logreg(
            X, y, l2=args.l2, epochs=args.epochs,
            learning_rate=args.learning_rate, metadata=meta,
        )
    else:
        inner = train_linear_svm(X, y, c=args.c, epochs=args.epochs, metadata=meta)
    model = IlluModel(
        inner=inner,
        feature_kind=args.feature_kind,
        decision_threshold=args.threshold,
    )
    save_illu_model(model, args.out)
    print(f"trained routing model on {len(rows)} labelled images")
    return 0


def simple_features(img: np.ndarray, kind: str) -> np.ndarray:
    if kind == "simple2":
        return simple2(img)
    if kind == "simple11":
        return simple11(img)
    raise DomainError(f"unknown feature kind {kind!r}")


def _cmd_classify(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    model = load_model(args.model)
    ids, X, code, k = _load_feature_matrix(args.features)
    want_code = model.metadata.get("spec")
    want_k = model.metadata.get("k")
    if want_code is not None and (want_code != code or want_k != k):
        raise DomainError(
            f"feature file is {code}/k={k} but the model expects "
            f"{want_code}/k={want_k}"
        )
    loss = LossMatrix(alpha=args.alpha)
    decisions = classify_features(model, ids, X, loss)
    records = [
        {"image_id": i, "score": decisions[i][0], "is_compound": decisions[i][1]}
        for i in ids
    ]
    Path(args.out).write_text(
        json.dumps(records, indent=2), encoding="utf-8"
    )
    predicted, truth = [], []
    for image_id in ids:
        predicted.append(1 if decisions[image_id][1] else 0)
        truth.append(1 if corpus.get(image_id).annotation.is_compound else 0)
    metrics = classifier_metrics(predicted, truth)
    print(
        f"accuracy {metrics['accuracy_pct']:.1f}%  "
        f"false-positive {metrics['fp_pct']:.1f}%  "
        f"false-negative {metrics['fn_pct']:.1f}%"
    )
    return 0


def _cmd_separate(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    params = CfsParams.from_file(args.params)
    illu, forced = _routing_args(args, parser)
    if illu is None and forced is None:
        parser.error("pick a detector with --routing or supply --illu")
    workers = resolve_workers(args.workers)
    results = separate_corpus(
        corpus,
        params,
        illu=illu,
        force_routing=forced,
        variant=Variant(args.variant),
        workers=workers,
    )
    annotations = [
        FigureAnnotation(entry.image_id, res.rects, len(res.rects) > 1)
        for entry, res in results
    ]
    save_results(annotations, args.out)
    if args.overlay:
        overlay_dir = Path(args.overlay)
        overlay_dir.mkdir(parents=True, exist_ok=True)
        for entry, res in results:
            img = load_image(corpus.image_file(entry))
            rgb = _overlay_image(img, res.rects)
            Image.fromarray(rgb).save(overlay_dir / f"{entry.image_id}.png")
    n_rects = sum(len(r.rects) for _, r in results)
    print(f"separated {len(results)} images into {n_rects} rectangles")
    return 0


def _cmd_evaluate(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    gt = [e.annotation for e in corpus]
    outputs = load_results(args.results)
    if args.chain:
        report = chain_evaluate(gt, outputs, args.protocol, corpus.image_sizes())
    else:
        report = evaluate_separations(gt, outputs, args.protocol)
    if args.out:
        report.save(args.out)
    print(report.summary_text())
    return 0


def _cmd_chain(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    params = CfsParams.from_file(args.params)
    illu, forced = _routing_args(args, parser)
    if illu is None and forced is None:
        parser.error("pick a detector with --routing or supply --illu")
    compound_pred = None
    if args.cfc_model:
        if not args.features:
            parser.error("--cfc-model needs --features")
        model = load_model(args.cfc_model)
        ids, X, _, _ = _load_feature_matrix(args.features)
        alpha = args.alpha
        if args.threshold is not None:
            if not 0.0 < args.threshold < 1.0:
                raise DomainError("decision threshold must lie strictly in (0, 1)")
            alpha = (1.0 - args.threshold) / args.threshold
        loss = LossMatrix(alpha=alpha)
        decisions = classify_features(model, ids, X, loss)
        compound_pred = {i: decisions[i][1] for i in ids}
    workers = resolve_workers(args.workers)
    outputs = run_chain(
        corpus,
        compound_pred,
        params,
        illu=illu,
        force_routing=forced,
        variant=Variant(args.variant),
        workers=workers,
    )
    save_results(outputs, args.out)
    if args.protocol:
        gt = [e.annotation for e in corpus]
        report = chain_evaluate(gt, outputs, args.protocol, corpus.image_sizes())
        if args.report:
            report.save(args.report)
        print(report.summary_text())
    else:
        print(f"wrote chain results for {len(outputs)} images to {args.out}")
    return 0


def _cmd_tune(args, parser) -> int:
    corpus = load_corpus(args.corpus)
    space = json.loads(Path(args.space).read_text(encoding="utf-8"))
    if not isinstance(space, dict) or not space:
        raise DomainError("search space must be a non-empty JSON object")
    base = CfsParams.from_file(args.params)
    illu, forced = _routing_args(args, parser)
    if illu is None and forced is None:
        parser.error("pick a detector with --routing or supply --illu")
    initial = {name: getattr(base, name) for name in space}
    workers = resolve_workers(args.workers)
    gt = [e.annotation for e in corpus]

    def eval_fn(cfg: dict) -> float:
        trial = base.with_updates(**cfg)
        results = separate_corpus(
            corpus, trial, illu=illu, force_routing=forced, workers=workers
        )
        outputs = [
            FigureAnnotation(e.image_id, r.rects, len(r.rects) > 1)
            for e, r in results
        ]
        report = evaluate_separations(gt, outputs, "imageclef")
        return 100.0 * report.aggregate["accuracy"]

    result = hill_climb(
        space, eval_fn, initial,
        stop_delta=args.stop_delta, max_rounds=args.max_rounds,
    )
    refine_values = top_values(result.trace, result.ranking[: args.grid_top])
    refined = None
    if refine_values:
        refined = grid_refine(result.params, refine_values, eval_fn)
    best = result if refined is None or refined.score <= result.score else refined
    payload = {
        "params": best.params,
        "score": best.score,
        "rounds": result.rounds,
        "evaluations": result.evaluations
        + (refined.evaluations if refined else 0),
        "ranking": result.ranking,
    }
    Path(args.out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    if args.trace:
        trace = list(result.trace) + (list(refined.trace) if refined else [])
        write_trace_csv(trace, args.trace)
    print(
        f"best score {best.score:.2f} after {payload['evaluations']} "
        f"evaluations ({result.rounds} rounds)"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser wiring.


def _add_train_flags(sub: _Parser) -> None:
    sub.add_argument("--algo", choices=("logreg", "svm"), default="logreg")
    sub.add_argument("--l2", type=float, default=1e-4)
    sub.add_argument("--epochs", type=int, default=500)
    sub.add_argument("--learning-rate", type=float, default=0.1)
    sub.add_argument("--c", type=float, default=1.0)


def _add_routing_flags(sub: _Parser) -> None:
    sub.add_argument("--routing", choices=("band", "edge"), default=None)
    sub.add_argument("--illu", default=None, help="routing model file")


def build_parser() -> _Parser:
    parser = _Parser(prog="figsep", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")

    sp = subs.add_parser("synth", help="generate a synthetic figure corpus")
    sp.add_argument("--spec", required=True, help="generator spec JSON file")
    sp.add_argument("--out", required=True, help="corpus directory to create")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--count", type=int, default=None)
    sp.set_defaults(fn=_cmd_synth)

    sp = subs.add_parser("features", help="extract classification features")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--set", required=True, help="three-digit profile code, e.g. 434")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--q", type=int, default=8)
    sp.add_argument("--h", type=int, default=3)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(fn=_cmd_features)

    sp = subs.add_parser("train-cfc", help="train the compound classifier")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--features", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--q", type=int, default=8)
    sp.add_argument("--h", type=int, default=3)
    _add_train_flags(sp)
    sp.set_defaults(fn=_cmd_train_cfc)

    sp = subs.add_parser("train-illu", help="train the detector routing model")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument(
        "--feature-kind", choices=("simple2", "simple11"), default="simple2"
    )
    sp.add_argument(
        "--strategy",
        choices=tuple(s.value for s in MappingStrategy),
        default="first",
    )
    sp.add_argument("--threshold", type=float, default=0.1)
    _add_train_flags(sp)
    sp.set_defaults(fn=_cmd_train_illu)

    sp = subs.add_parser("classify", help="classify images compound or not")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--features", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.set_defaults(fn=_cmd_classify)

    sp = subs.add_parser("separate", help="split compound figures")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--params", default="optimal", help="optimal, initial, or a JSON file")
    sp.add_argument(
        "--variant", choices=tuple(v.value for v in Variant), default="once"
    )
    sp.add_argument("--overlay", default=None, help="directory for debug overlays")
    sp.add_argument("--workers", type=int, default=None)
    _add_routing_flags(sp)
    sp.set_defaults(fn=_cmd_separate)

    sp = subs.add_parser("evaluate", help="score results against ground truth")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--results", required=True)
    sp.add_argument("--protocol", choices=("imageclef", "nlm"), required=True)
    sp.add_argument("--out", default=None, help="write the full report JSON here")
    sp.add_argument(
        "--chain",
        action="store_true",
        help="score with whole-image semantics for non-compound decisions",
    )
    sp.set_defaults(fn=_cmd_evaluate)

    sp = subs.add_parser("chain", help="run classification then separation")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--cfc-model", default=None)
    sp.add_argument("--features", default=None)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="compound decision threshold; overrides --alpha",
    )
    sp.add_argument("--params", default="optimal")
    sp.add_argument(
        "--variant", choices=tuple(v.value for v in Variant), default="once"
    )
    sp.add_argument("--protocol", choices=("imageclef", "nlm"), default=None)
    sp.add_argument("--report", default=None)
    sp.add_argument("--workers", type=int, default=None)
    _add_routing_flags(sp)
    sp.set_defaults(fn=_cmd_chain)

    sp = subs.add_parser("tune", help="search separation parameters")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--space", required=True, help="JSON object of candidate lists")
    sp.add_argument("--out", required=True)
    sp.add_argument("--trace", default=None, help="CSV evaluation trace")
    sp.add_argument("--params", default="initial")
    sp.add_argument("--stop-delta", type=float, default=5.0)
    sp.add_argument("--max-rounds", type=int, default=25)
    sp.add_argument("--grid-top", type=int, default=5)
    sp.add_argument("--workers", type=int, default=None)
    _add_routing_flags(sp)
    sp.set_defaults(fn=_cmd_tune)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse help/version/usage errors
        return int(exc.code or 0)
    if not getattr(args, "fn", None):
        parser.print_help()
        return 1
    try:
        return args.fn(args, parser)
    except SystemExit as exc:  # parser.error() inside a subcommand
        return int(exc.code or 0)
    except FigsepError as exc:
        print(f"figsep: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"figsep: error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"figsep: error: invalid JSON input: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
