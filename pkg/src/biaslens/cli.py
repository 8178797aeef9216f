"""Single entry point exposing every analysis as a subcommand.

All subcommands are config-file driven (JSON), with a handful of flags that
override file values.  Each run writes a versioned report plus figure-ready
CSVs into the output directory.  Exit codes: 0 success, 1 validation error,
2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import report as report_mod
from .classify import (
    FeatureSpec,
    TrainConfig,
    pseudo_dataset_check,
    run_trials,
    sweep,
    train,
)
from .errors import BiasLensError, DuplicateId, IoError, ParseError
from .images import ImageBuffer, load_image, save_image
from .llm import (
    HttpTransport,
    IclConfig,
    MockTransport,
    PromptLog,
    run_icl_eval,
    summarize_datasets,
)
from .manifest import DatasetManifest, Sample, load_manifest, load_vocabulary, save_manifest
from .objects import (
    accuracy_vs_majority_share,
    apply_majority_rule,
    build_presence,
    class_shares,
    fit_majority_rule,
    rank_classes_by_coefficients,
    unique_object_stats,
)
from .sampling import sample_split
from .text import (
    TokenizeConfig,
    build_corpus,
    caption_classification,
    lda_fit,
    phrase_frequencies,
    top_words,
)
from .transforms import build_transform
from .transforms.color import mean_rgb


class UsageError(BiasLensError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: invalid JSON ({exc.msg})") from exc


def _require(config: dict, key: str):
    if key not in config:
        raise UsageError(f"config is missing required field {key!r}")
    return config[key]


def _seed_of(config: dict) -> int:
    if config.get("seed") is None:
        raise UsageError("a 'seed' is required for stochastic subcommands")
    return int(config["seed"])


def _manifests_of(config: dict) -> list[DatasetManifest]:
    paths = _require(config, "manifests")
    if not isinstance(paths, list) or not paths:
        raise UsageError("'manifests' must be a nonempty list of paths")
    return [load_manifest(p) for p in paths]


def _train_config(config: dict, seed: int) -> TrainConfig:
    t = dict(config.get("train", {}))
    return TrainConfig(
        epochs=int(t.get("epochs", 50)),
        batch_size=int(t.get("batch_size", 64)),
        learning_rate=float(t.get("learning_rate", 0.1)),
        weight_decay=float(t.get("weight_decay", 1e-4)),
        label_smoothing=float(t.get("label_smoothing", 0.1)),
        seed=seed,
    )


def _feature_spec(config: dict) -> FeatureSpec:
    f = dict(config.get("features", {}))
    return FeatureSpec(
        kind=f.get("kind", "raw_pixels"),
        side=int(f.get("side", 64)),
        cell=int(f.get("cell", 8)),
        bins=int(f.get("bins", 9)),
        vocab_size=int(f.get("vocab_size", 1000)),
        normalize=bool(f.get("normalize", False)),
    )


def _mean_rgb_block(manifests) -> list[dict]:
    rows = []
    for manifest in manifests:
        for sample in manifest.samples:
            img = load_image(sample.image_path)
            if img.channels != 3:
                continue
            _, means = mean_rgb(img)
            rows.append({
                "dataset": manifest.name, "id": sample.id,
                "r": means[0], "g": means[1], "b": means[2],
            })
    return rows


def _finish(command: str, config: dict, results: dict, out_dir, started: float) -> int:
    timings = {"wall_clock_seconds": time.monotonic() - started}
    rep = report_mod.make_report(command, config, results, timings)
    path = os.path.join(out_dir, "report.json")
    report_mod.write_report(rep, path)
    written = report_mod.emit_plot_data(rep, out_dir)
    print(f"report written to {path}")
    for p in written:
        print(f"plot data written to {p}")
    return 0


def _cmd_transform(args) -> int:
    started = time.monotonic()
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    if spec.get("transform") == "concat":
        raise UsageError(
            "concatenated channels are classifier inputs and cannot be "
            "exported as PNG; use them in a classify config instead"
        )
    if args.seed is not None:
        spec.setdefault("seed", args.seed)
    transform = build_transform(spec, default_seed=int(spec.get("seed", 0)))
    manifest = load_manifest(args.manifest)
    image_dir = os.path.join(args.out, "images")
    os.makedirs(image_dir, exist_ok=True)
    new_samples = []
    for sample in manifest.samples:
        img = load_image(sample.image_path)
        result = transform(img, sample.id)
        if not isinstance(result, ImageBuffer):
            raise UsageError("transform did not produce an exportable image")
        out_path = os.path.join(image_dir, f"{sample.id}.png")
        save_image(result, out_path)
        new_samples.append(Sample(
            id=sample.id, image_path=out_path,
            object_classes=sample.object_classes,
            single_label=sample.single_label,
            caption_short=sample.caption_short,
            caption_long=sample.caption_long,
        ))
    out_manifest = DatasetManifest(name=manifest.name, samples=tuple(new_samples))
    manifest_path = os.path.join(args.out, "manifest.jsonl")
    save_manifest(out_manifest, manifest_path)
    config = {"spec": spec, "manifest": args.manifest, "out": args.out}
    results = {"n_images": len(new_samples), "manifest": manifest_path}
    return _finish("transform", config, results, args.out, started)


def _effective_classify_config(config: dict) -> dict:
    seed = _seed_of(config)
    return {
        "manifests": config["manifests"],
        "transform": config.get("transform"),
        "features": dataclasses.asdict(_feature_spec(config)),
        "train": dataclasses.asdict(_train_config(config, seed)),
        "n_trials": int(config.get("n_trials", 3)),
        "n_train": int(_require(config, "n_train")),
        "n_val": int(_require(config, "n_val")),
        "seed": seed,
        "caption_field": config.get("caption_field", "short"),
        "vocab": config.get("vocab"),
    }


def _cmd_classify(args) -> int:
    started = time.monotonic()
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    effective = _effective_classify_config(config)
    manifests = _manifests_of(config)
    seed = effective["seed"]
    feature_spec = _feature_spec(config)
    vocab = load_vocabulary(config["vocab"]) if config.get("vocab") else None
    trial = run_trials(
        manifests,
        config.get("transform"),
        feature_spec,
        _train_config(config, seed),
        effective["n_trials"],
        effective["n_train"],
        effective["n_val"],
        vocab=vocab,
        caption_field=effective["caption_field"],
    )
    results: dict = {"trial_report": trial.to_dict()}
    if feature_spec.needs_images:
        results["mean_rgb"] = _mean_rgb_block(manifests)
    if config.get("pseudo_check"):
        pc = config["pseudo_check"]
        rows = pseudo_dataset_check(
            manifests[0], int(pc.get("k", 3)), list(pc["sizes"]),
            _train_config(config, seed), feature_spec,
            transform_config=config.get("transform"),
            val_fraction=float(pc.get("val_fraction", 0.25)),
        )
        results["pseudo_dataset_check"] = [
            {"size": s, "train_accuracy": tr, "val_accuracy": va}
            for s, tr, va in rows
        ]
    out = args.out or config.get("out") or "."
    return _finish("classify", effective, results, out, started)


def _cmd_sweep(args) -> int:
    started = time.monotonic()
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    effective = _effective_classify_config(config)
    axis = _require(config, "axis")
    values = _require(config, "values")
    base = dict(_require(config, "transform"))
    effective.update({"axis": axis, "values": values})
    manifests = _manifests_of(config)
    rows = sweep(
        manifests, axis, values, base,
        _feature_spec(config),
        _train_config(config, effective["seed"]),
        effective["n_trials"], effective["n_train"], effective["n_val"],
    )
    block = {
        "axis": axis,
        "rows": [
            {
                "value": value,
                "mean": rep.mean,
                "std": rep.std,
                "per_trial_accuracy": list(rep.per_trial_accuracy),
            }
            for value, rep in rows
        ],
    }
    out = args.out or config.get("out") or "."
    return _finish("sweep", effective, {"sweep": block}, out, started)


def _cmd_objects(args) -> int:
    started = time.monotonic()
    config = _load_config(args.config)
    if args.manifests:
        config["manifests"] = args.manifests
    if args.vocab:
        config["vocab"] = args.vocab
    if args.seed is not None:
        config["seed"] = args.seed
    manifests = _manifests_of(config)
    vocab = load_vocabulary(_require(config, "vocab"))
    seed = _seed_of(config)
    min_support = int(config.get("min_support", 20))
    min_frequency = int(config.get("min_frequency", 20))
    top_k = int(config.get("top_k", 8))

    pm = build_presence(manifests, vocab)
    shares = class_shares(pm, min_support=min_support)
    histograms, means = unique_object_stats(pm)

    results: dict = {
        "class_shares": {
            "min_support": min_support,
            "top_classes": {
                m.name: [
                    {"class": c, "share": s, "support": n}
                    for c, s, n in shares.top_classes(d, top_k)
                ]
                for d, m in enumerate(manifests)
            },
        },
        "unique_objects": {
            "dataset_names": [m.name for m in manifests],
            "histograms": [h.tolist() for h in histograms],
            "means": means,
        },
    }

    n_train = int(config.get("n_train", 0))
    n_val = int(config.get("n_val", 0))
    if n_train and n_val:
        split = sample_split(manifests, n_train, n_val, seed)
        # presence-matrix rows follow manifest order; map (manifest, sample)
        # pairs onto those row numbers
        offsets = np.cumsum([0] + [len(m) for m in manifests[:-1]])
        train_rows = np.array([offsets[mi] + si for mi, si in split.train])
        val_rows = np.array([offsets[mi] + si for mi, si in split.val])
        x, labels = pm.matrix.astype(float), pm.dataset_labels
        model = train(
            x[train_rows], labels[train_rows], _train_config(config, seed),
            class_names=[m.name for m in manifests],
        )
        rankings = rank_classes_by_coefficients(model, pm, min_frequency=min_frequency)
        results["coefficient_rankings"] = {
            m.name: [
                {"class": c, "weight": w}
                for c, w in rankings[d][: int(config.get("top_k", 8))]
            ]
            for d, m in enumerate(manifests)
        }
        all_samples = [s for m in manifests for s in m.samples]
        if all(s.single_label is not None for s in all_samples):
            train_labels = [all_samples[r].single_label for r in train_rows]
            val_labels = [all_samples[r].single_label for r in val_rows]
            rule = fit_majority_rule(train_labels, labels[train_rows], len(manifests))
            preds, accuracy, unseen = apply_majority_rule(
                rule, val_labels, labels[val_rows]
            )
            table = accuracy_vs_majority_share(
                preds, labels[val_rows], val_labels, len(manifests),
                min_support=int(config.get("correlation_min_support", 1)),
            )
            results["majority_rule"] = {
                "val_accuracy": accuracy,
                "unseen_labels": unseen,
            }
            results["share_accuracy"] = {
                "labels": list(table.labels),
                "majority_share": table.majority_share.tolist(),
                "accuracy": table.accuracy.tolist(),
                "support": table.support.tolist(),
                "pearson_r": None if table.degenerate else table.r,
                "degenerate": table.degenerate,
            }

    effective = dict(config)
    effective.update({
        "min_support": min_support, "min_frequency": min_frequency,
        "seed": seed,
    })
    out = args.out or config.get("out") or "."
    return _finish("objects", effective, results, out, started)


def _cmd_text(args) -> int:
    started = time.monotonic()
    config = _load_config(args.config)
    if args.manifests:
        config["manifests"] = args.manifests
    if args.mode:
        config["mode"] = args.mode
    if args.seed is not None:
        config["seed"] = args.seed
    mode = _require(config, "mode")
    if mode not in ("freq", "lda", "classify"):
        raise UsageError(f"unknown text mode {mode!r}")
    manifests = _manifests_of(config)
    tok_config = TokenizeConfig(emit_bigrams=bool(config.get("bigrams", False)))
    corpus = build_corpus(
        manifests, config.get("caption_field", "short"), tok_config
    )
    results: dict = {
        "preprocessing": {
            "caption_field": config.get("caption_field", "short"),
            "min_token_length": tok_config.min_length,
            "bigrams": tok_config.emit_bigrams,
            "stopword_count": len(tok_config.stopwords),
        }
    }
    if mode == "freq":
        n_top = int(config.get("n_top", 100))
        freqs = phrase_frequencies(corpus, n_top)
        results["phrase_frequencies"] = {
            m.name: [[phrase, count] for phrase, count in rows]
            for m, rows in zip(manifests, freqs)
        }
        out = args.out or config.get("out") or "."
        os.makedirs(out, exist_ok=True)
        import csv as _csv

        csv_path = os.path.join(out, "phrase_counts.csv")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = _csv.writer(fh, lineterminator="\n")
            writer.writerow(["dataset", "phrase", "count"])
            for m, rows in zip(manifests, freqs):
                for phrase, count in rows:
                    writer.writerow([m.name, phrase, count])
        print(f"plot data written to {csv_path}")
    elif mode == "lda":
        seed = _seed_of(config)
        model = lda_fit(
            corpus,
            k=int(config.get("topics", 5)),
            alpha=float(config.get("alpha", 0.1)),
            beta=float(config.get("beta", 0.01)),
            iterations=int(config.get("iterations", 500)),
            seed=seed,
        )
        results["topics"] = {
            "k": model.k,
            "alpha": model.alpha,
            "beta": model.beta,
            "top_words": top_words(model, int(config.get("words_per_topic", 5))),
        }
    else:
        seed = _seed_of(config)
        trial = caption_classification(
            corpus,
            int(config.get("vocab_size", 1000)),
            _train_config(config, seed),
            int(config.get("n_trials", 3)),
            int(_require(config, "n_train")),
            int(_require(config, "n_val")),
            normalize=bool(config.get("normalize", False)),
        )
        block = trial.to_dict()
        block["note"] = (
            "bag-of-words proxy; not comparable with embedding-based "
            "caption classification accuracies"
        )
        results["caption_trial_report"] = block
    out = args.out or config.get("out") or "."
    return _finish("text", dict(config), results, out, started)


def _transport_from_config(config: dict):
    t = dict(config.get("transport", {}))
    kind = t.get("kind", "http")
    if kind == "mock":
        responses = t.get("responses")
        if responses is None and t.get("script"):
            with open(t["script"], "r", encoding="utf-8") as fh:
                responses = json.load(fh)
        if responses is None:
            raise UsageError("mock transport needs 'responses' or 'script'")
        return MockTransport(responses=list(responses))
    if kind == "http":
        return HttpTransport(
            endpoint=t.get("endpoint"),
            model=t.get("model"),
            timeout=float(t.get("timeout", 60.0)),
            retries=int(t.get("retries", 2)),
        )
    raise UsageError(f"unknown transport kind {kind!r}")


def _cmd_llm(args) -> int:
    started = time.monotonic()
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    mode = config.get("mode", "icl")
    manifests = _manifests_of(config)
    seed = _seed_of(config)
    field = config.get("caption_field", "long")
    caption_sets = []
    for m in manifests:
        captions = [s.caption(field) for s in m.samples if s.caption(field)]
        caption_sets.append(captions)
    transport = _transport_from_config(config)
    out = args.out or config.get("out") or "."
    os.makedirs(out, exist_ok=True)
    log = PromptLog(os.path.join(out, "llm_log.jsonl"))
    results: dict = {}
    if mode == "icl":
        icl = dict(config.get("icl", {}))
        cfg = IclConfig(
            demos_per_dataset=int(icl.get("demos_per_dataset", 120)),
            stop_window=int(icl.get("stop_window", 100)),
            stop_epsilon=float(icl.get("stop_epsilon", 0.01)),
        )
        outcome = run_icl_eval(caption_sets, transport, cfg, seed=seed, log=log)
        results["icl"] = {
            "curve": list(outcome.curve),
            "final_accuracy": outcome.final_accuracy,
            "n_holdouts": outcome.n_holdouts,
            "n_unparseable": outcome.n_unparseable,
            "stopped_early": outcome.stopped_early,
            "stop_rule": {
                "window": cfg.stop_window, "epsilon": cfg.stop_epsilon,
            },
        }
    elif mode == "summarize":
        s = dict(config.get("summary", {}))
        outcome = summarize_datasets(
            caption_sets, transport,
            iterations=int(s.get("iterations", 10)),
            captions_per_iteration=int(s.get("captions_per_iteration", 120)),
            patterns_per_dataset=int(s.get("patterns_per_dataset", 2)),
            bullets_per_dataset=int(s.get("bullets_per_dataset", 5)),
            seed=seed, log=log,
        )
        results["summary"] = {
            m.name: {
                "patterns": list(outcome.patterns[d]),
                "bullets": list(outcome.bullets[d]),
            }
            for d, m in enumerate(manifests)
        }
    else:
        raise UsageError(f"unknown llm mode {mode!r}")
    return _finish("llm", dict(config), results, out, started)


def _cmd_report(args) -> int:
    started = time.monotonic()
    rep = report_mod.load_report(args.report)
    written = report_mod.emit_plot_data(rep, args.out, blocks=args.blocks)
    for p in written:
        print(f"plot data written to {p}")
    del started
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="biaslens", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("transform", help="write transformed copies of a dataset")
    p.add_argument("--spec", required=True, help="transform spec JSON file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_transform)

    for name, func, needs_manifests in (
        ("classify", _cmd_classify, False),
        ("sweep", _cmd_sweep, False),
        ("objects", _cmd_objects, True),
        ("text", _cmd_text, True),
        ("llm", _cmd_llm, False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="seed (overrides config)")
        if needs_manifests:
            p.add_argument("--manifests", nargs="+")
            p.add_argument("--vocab")
        if name == "text":
            p.add_argument("--mode", choices=["freq", "lda", "classify"])
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="export plot CSVs from an existing report")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--blocks", nargs="+")
    p.set_defaults(func=_cmd_report)
    return parser


_VALIDATION_ERRORS = (UsageError, ParseError, DuplicateId, IoError)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "command", None) is None:
        print(parser.format_usage(), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"{type(exc).__module__}.{type(exc).__qualname__}: {exc}",
              file=sys.stderr)
        return 1
    except Exception as exc:  # runtime errors surface as exit 2, never tracebacks
        print(f"{type(exc).__module__}.{type(exc).__qualname__}: {exc}",
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
