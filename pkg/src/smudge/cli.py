"""Command-line driver: ingest, synth, split, noise, train, eval, sweep.

Exit codes: 0 success, 2 usage/config error, 3 runtime failure. Every
state-producing command writes a metadata sidecar (tool version plus the
resolved parameters) so the run can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import corpus, evaluation, models
from .__about__ import __version__
from .config import KNOWN_KEYS, ConfigError, RunConfig, parse_config_file
from .corpus import SplitSpec, load_dataset, save_dataset
from .noise import NoisePlan, apply_noise
from .text import build_vocabulary


def _fail(code: int, message: str) -> int:
    print(f"smudge: {message}", file=sys.stderr)
    return code


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")


def _write_meta(out_path: Path, command: str, params: dict) -> None:
    _write_json(
        Path(str(out_path) + ".meta.json"),
        {"tool": "smudge", "version": __version__, "command": command, "params": params},
    )


def _load_input(args) -> corpus.Dataset:
    if args.format == "newsgroups":
        return corpus.ingest_newsgroups(args.input, name=getattr(args, "name", None))
    return load_dataset(
        args.input, args.format, delimiter=args.delimiter, name=getattr(args, "name", None)
    )


def cmd_ingest(args) -> int:
    try:
        dataset = _load_input(args)
    except (OSError, ValueError) as err:
        return _fail(2, str(err))
    try:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_dataset(dataset, out)
        summary = corpus.summarize(dataset)
        summary_path = Path(args.summary) if args.summary else Path(str(out) + ".summary.json")
        _write_json(summary_path, summary)
        _write_meta(out, "ingest", {"input": str(args.input), "format": args.format})
        print(json.dumps(summary, ensure_ascii=False))
    except Exception as err:  # noqa: BLE001 - boundary of the process
        return _fail(3, str(err))
    return 0


def cmd_synth(args) -> int:
    try:
        sources = []
        for item in args.source:
            if "=" not in item:
                raise ValueError(f"--source expects NAME=PATH, got {item!r}")
            source_name, path = item.split("=", 1)
            sources.append((source_name, load_dataset(path, name=source_name)))
        dataset = corpus.build_synthetic(sources, name=args.name)
    except (OSError, ValueError) as err:
        return _fail(2, str(err))
    try:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_dataset(dataset, out)
        summary = corpus.summarize(dataset)
        _write_json(Path(str(out) + ".summary.json"), summary)
        _write_meta(out, "synth", {"sources": list(args.source)})
        print(json.dumps(summary, ensure_ascii=False))
    except Exception as err:
        return _fail(3, str(err))
    return 0


def cmd_split(args) -> int:
    try:
        dataset = _load_input(args)
        spec = SplitSpec(test_fraction=args.test_fraction, seed=args.seed, stratified=args.stratified)
    except (OSError, ValueError) as err:
        return _fail(2, str(err))
    try:
        train, test = corpus.split_train_test(dataset, spec)
        for part, path in ((train, args.out_train), (test, args.out_test)):
            out = Path(path)
            out.parent.mkdir(parents=True, exist_ok=True)
            save_dataset(part, out)
        _write_meta(
            Path(args.out_train),
            "split",
            {
                "input": str(args.input),
                "test_fraction": args.test_fraction,
                "seed": args.seed,
                "stratified": args.stratified,
                "train_documents": len(train),
                "test_documents": len(test),
            },
        )
        print(json.dumps({"train": len(train), "test": len(test)}))
    except Exception as err:
        return _fail(3, str(err))
    return 0


def cmd_noise(args) -> int:
    try:
        dataset = _load_input(args)
        distractor = (
            load_dataset(args.distractor, args.distractor_format) if args.distractor else None
        )
        plan = NoisePlan(
            level=args.level,
            seed=args.seed,
            enable_truncate=args.truncate,
            enable_intersperse=args.intersperse,
            enable_flip=args.flip,
            enable_replicate=args.replicate,
            distractor=distractor,
            truncate_keep=args.truncate_keep,
        )
    except (OSError, ValueError) as err:
        return _fail(2, str(err))
    try:
        noised = apply_noise(dataset, plan)
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_dataset(noised, out)
        _write_meta(
            out,
            "noise",
            {
                "input": str(args.input),
                "noise.level": args.level,
                "noise.seed": args.seed,
                "noise.enable_truncate": args.truncate,
                "noise.enable_intersperse": args.intersperse,
                "noise.enable_flip": args.flip,
                "noise.enable_replicate": args.replicate,
                "noise.truncate_keep": args.truncate_keep,
                "noise.distractor_path": str(args.distractor) if args.distractor else None,
            },
        )
        print(json.dumps({"documents": len(noised), "level": args.level}))
    except Exception as err:
        return _fail(3, str(err))
    return 0


def _spec_from_args(args, family: str) -> models.ClassifierSpec:
    return models.ClassifierSpec(
        family=family,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        l2=args.l2,
        embedding_dim=args.embedding_dim,
        bigrams=args.bigrams,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    try:
        dataset = _load_input(args)
        spec = _spec_from_args(args, args.family)
    except (OSError, ValueError) as err:
        return _fail(2, str(err))
    try:
        seqs = models._feature_seqs([doc.text for doc in dataset.documents], spec.bigrams)
        vocab = build_vocabulary(seqs, min_count=args.min_count, max_df_ratio=args.max_df)
        model = models.train(dataset, spec, vocabulary=vocab)
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        models.save_model(model, out)
        if args.vocab_out:
            vocab.save(args.vocab_out)
        _write_meta(out, "train", {"input": str(args.input), "spec": dataclasses.asdict(spec)})
        print(json.dumps({"family": spec.family, "vocabulary": len(vocab), "labels": len(dataset.label_set)}))
    except Exception as err:
        return _fail(3, str(err))
    return 0


def cmd_eval(args) -> int:
    try:
        model = models.load_model(args.model)
        dataset = _load_input(args)
    except (OSError, ValueError) as err:
        return _fail(2, str(err))
    try:
        accuracy = models.evaluate(model, dataset)
        result = {"accuracy": accuracy, "documents": len(dataset), "model": str(args.model)}
        if args.out:
            _write_json(Path(args.out), result)
        print(json.dumps(result))
    except Exception as err:
        return _fail(3, str(err))
    return 0


def cmd_sweep(args) -> int:
    try:
        raw = parse_config_file(args.config)
        for item in args.set or []:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            key = key.strip()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"--set: unknown key {key!r}")
            raw[key] = value.strip()
        if args.out:
            raw["out.dir"] = args.out
        cfg = RunConfig(raw)
        cfg.validate_for_sweep()

        dataset = load_dataset(cfg.dataset_path, cfg.dataset_format, delimiter=cfg.delimiter)
        if cfg.subsample_n is not None:
            dataset = corpus.subsample(dataset, cfg.subsample_n, derive_seed_for(cfg, "subsample"))
        split = SplitSpec(cfg.test_fraction, cfg.split_seed, cfg.stratified)
        train, test = corpus.split_train_test(dataset, split)
        distractor = (
            load_dataset(cfg.distractor_path, cfg.distractor_format)
            if cfg.distractor_path
            else None
        )
        plan = NoisePlan(
            level=0.0,
            seed=cfg.noise_seed,
            enable_truncate=cfg.enable_truncate,
            enable_intersperse=cfg.enable_intersperse,
            enable_flip=cfg.enable_flip,
            enable_replicate=cfg.enable_replicate,
            distractor=distractor,
            truncate_keep=cfg.truncate_keep,
        )
    except (OSError, ValueError) as err:
        return _fail(2, str(err))

    try:
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        reports = []
        for family in cfg.families:
            spec = models.ClassifierSpec(
                family=family,
                epochs=cfg.epochs,
                learning_rate=cfg.learning_rate,
                l2=cfg.l2,
                embedding_dim=cfg.embedding_dim,
                bigrams=cfg.bigrams,
                seed=cfg.model_seed,
            )
            vocab_dir = out_dir / ("vocab" if len(cfg.families) == 1 else f"vocab_{family}")
            report = evaluation.sweep(
                train,
                test,
                spec,
                cfg.grid,
                plan,
                k=cfg.folds,
                min_count=cfg.min_count,
                max_df_ratio=cfg.max_df,
                vocab_dump_dir=vocab_dir,
            )
            report.metadata["config"] = cfg.echo()
            reports.append(report)

        report_path = out_dir / "report.json"
        curves_path = out_dir / "curves.csv"
        if len(reports) == 1:
            report_path.write_text(reports[0].to_json(), encoding="utf-8")
            curves_path.write_text(reports[0].curves_csv(), encoding="utf-8")
        else:
            payload = {"runs": [r.to_dict() for r in reports]}
            report_path.write_text(
                json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
            )
            lines = ["family,level,dirty_cv_mean,dirty_cv_std,clean_test"]
            for family, report in zip(cfg.families, reports):
                for r in report.levels:
                    lines.append(
                        f"{family},{r.level!r},{r.dirty_cv_mean!r},{r.dirty_cv_std!r},{r.clean_test!r}"
                    )
            curves_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(json.dumps({"report": str(report_path), "curves": str(curves_path)}))
    except Exception as err:
        return _fail(3, str(err))
    return 0


def derive_seed_for(cfg: RunConfig, purpose: str) -> int:
    from .seeding import derive_seed

    return derive_seed(cfg.master_seed, purpose)


def _add_input_options(parser, formats=("jsonl", "delimited", "tsv", "newsgroups")):
    parser.add_argument("input", help="input dataset path")
    parser.add_argument("--format", choices=formats, default="jsonl")
    parser.add_argument("--delimiter", default=",", help="field delimiter for delimited files")
    parser.add_argument("--name", default=None, help="dataset name override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smudge",
        description="Inject controlled noise into labeled text corpora and "
        "measure how dirty-data metrics diverge from clean-test performance.",
    )
    parser.add_argument("--version", action="version", version=f"smudge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a corpus into the interchange format")
    _add_input_options(p)
    p.add_argument("--out", required=True, help="canonical dataset file to write")
    p.add_argument("--summary", default=None, help="summary JSON path")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="build a dataset whose labels are the source corpora")
    p.add_argument("--source", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--name", default="synthetic")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="carve out a clean held-out test set")
    _add_input_options(p)
    p.add_argument("--test-fraction", type=float, default=0.30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratified", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("noise", help="apply the composite noise schedule to a training set")
    _add_input_options(p)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distractor", default=None, help="distractor corpus for interspersal")
    p.add_argument("--distractor-format", choices=("jsonl", "delimited", "tsv"), default="jsonl")
    p.add_argument("--truncate", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--intersperse", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--flip", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--replicate", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--truncate-keep", choices=("prefix", "suffix"), default="prefix")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("train", help="fit a classifier on a dataset")
    _add_input_options(p)
    p.add_argument("--family", choices=models.FAMILIES, default="bow_linear")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--embedding-dim", type=int, default=100)
    p.add_argument("--bigrams", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-count", type=int, default=6)
    p.add_argument("--max-df", type=float, default=0.5)
    p.add_argument("--out", required=True, help="model container path")
    p.add_argument("--vocab-out", default=None, help="vocabulary dump path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a trained model on a dataset")
    _add_input_options(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None, help="write the result JSON here too")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run the full two-curve noise sweep from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--out", default=None, help="override out.dir")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
