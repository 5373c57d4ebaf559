"""Command-line interface: index, query, thresholds, train-weights,
evaluate, inspect.

Exit codes: 0 success, 1 diagnostic failure (parse/IO/format/weights),
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .dynselect import (
    SelectionConfig, class_thresholds, draw_sample, load_thresholds,
    save_thresholds, select_classes,
)
from .errors import CodesimError
from .evaluation import EvalConfig, GroundTruth, report_rows, run_benchmark
from .features import FEATURE_CLASSES, LabeledTree
from .indexing import build_database, extract_query_vector
from .store import CodeDatabase, load, save, top_k
from .weights import (
    TrainConfig, WeightProfile, build_training_pairs, finalize_weights,
    load_profile, save_profile, train_linear, training_accuracy,
)

DB_ENV_VAR = "CODESIM_DB"
OUTPUT_SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CodesimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codesim",
        description="Similarity search over C functions by code features.")
    parser.add_argument("--version", action="version", version=f"codesim {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("index", help="build a code database from a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--no-source", action="store_true",
                   help="do not store function source text in the database")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="search the database with a C function")
    _add_db_arg(p)
    p.add_argument("query_file")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--weights", default="equal",
                   help="'equal', 'dyn-select', or a weight-profile JSON path")
    p.add_argument("--t-uniq", type=float, default=0.15)
    p.add_argument("--n-samp", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thresholds", help="dyn-select thresholds sidecar path")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("thresholds", help="precompute the dyn-select sidecar")
    _add_db_arg(p)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-samp", type=int, default=200)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("train-weights", help="learn a weight profile from ground truth")
    _add_db_arg(p)
    p.add_argument("--groundtruth", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--negatives-per-positive", type=int, default=3)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--reg-lambda", type=float, default=0.01)
    p.add_argument("--max-distractors", type=int, default=1000)
    p.set_defaults(func=cmd_train_weights)

    p = sub.add_parser("evaluate", help="run the retrieval benchmark from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inspect", help="pretty-print one record's feature vector")
    _add_db_arg(p)
    p.add_argument("record_id")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_inspect)
    return parser


def _add_db_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--db", default=None,
                        help=f"database path (default: ${DB_ENV_VAR})")


def _open_db(args) -> CodeDatabase:
    path = args.db or os.environ.get(DB_ENV_VAR)
    if not path:
        raise UsageError(f"no database given: use --db or set ${DB_ENV_VAR}")
    return load(path)


def cmd_index(args) -> int:
    db = build_database(args.manifest, include_source=not args.no_source)
    save(db, args.output)
    print(f"indexed {len(db)} functions -> {args.output}")
    return 0


def _resolve_weights(args, db: CodeDatabase, query_vector) -> WeightProfile:
    if args.weights == "equal":
        return WeightProfile.equal()
    if args.weights == "dyn-select":
        selection = SelectionConfig(t_uniq=args.t_uniq,
                                    n_samp=min(args.n_samp, max(len(db), 2)))
        if len(db) < 2:
            print("warning: database too small for dyn-select, using equal weights",
                  file=sys.stderr)
            return WeightProfile.equal()
        if args.thresholds and os.path.exists(args.thresholds):
            pool, thresholds = load_thresholds(args.thresholds, db)
        else:
            pool = draw_sample(db, selection.n_samp, args.seed)
            thresholds = class_thresholds(pool)
            if args.thresholds:
                save_thresholds(args.thresholds, db, pool, thresholds)
        profile = select_classes(query_vector, pool, thresholds, selection)
        if profile.fallback:
            print("warning: no distinctive feature-class; fell back to equal weights",
                  file=sys.stderr)
        return profile
    if os.path.exists(args.weights):
        return load_profile(args.weights)
    raise UsageError(f"--weights must be 'equal', 'dyn-select', or a profile file "
                     f"(got {args.weights!r})")


def cmd_query(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    db = _open_db(args)
    with open(args.query_file, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        _ir, vector = extract_query_vector(args.query_file, text, db)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    profile = _resolve_weights(args, db, vector)
    ranked = top_k(db, vector, profile, args.k)
    if args.format == "json":
        doc = {
            "schema_version": OUTPUT_SCHEMA_VERSION,
            "query": args.query_file,
            "weights": profile.to_dict(),
            "results": [_entry_json(db, entry) for entry in ranked.entries],
        }
        json.dump(doc, sys.stdout, indent=1, sort_keys=True)
        print()
    else:
        _print_weights(profile)
        if not ranked.entries:
            print("no results (database is empty)")
        for rank, entry in enumerate(ranked.entries, 1):
            record = db.get(entry.id)
            print(f"#{rank}  {entry.score:.4f}  {record.name}  ({record.path}:{record.line})")
            print("     " + _breakdown_line(entry.sims))
    return 0


def _entry_json(db: CodeDatabase, entry) -> dict:
    record = db.get(entry.id)
    return {
        "id": entry.id,
        "name": record.name,
        "path": record.path,
        "line": record.line,
        "score": entry.score,
        "per_class": dict(zip(FEATURE_CLASSES, entry.sims)),
    }


def _print_weights(profile: WeightProfile) -> None:
    active = [f"{cid}={w:.3f}" for cid, w in profile.to_dict().items() if w > 0]
    print("weights: " + (" ".join(active) if active else "(none)"))


def _breakdown_line(sims) -> str:
    return " ".join(f"{cid}:{sim:.2f}" for cid, sim in zip(FEATURE_CLASSES, sims))


def cmd_thresholds(args) -> int:
    db = _open_db(args)
    n_samp = min(args.n_samp, len(db))
    if n_samp < 2:
        raise UsageError("database too small to sample thresholds")
    pool = draw_sample(db, n_samp, args.seed)
    thresholds = class_thresholds(pool)
    save_thresholds(args.output, db, pool, thresholds)
    print(f"thresholds over {n_samp} samples -> {args.output}")
    return 0


def cmd_train_weights(args) -> int:
    db = _open_db(args)
    gt = GroundTruth.load(args.groundtruth)
    distractors = sorted(r.id for r in db if r.distractor)
    if len(distractors) > args.max_distractors:
        import random as _random
        distractors = sorted(_random.Random(args.seed).sample(
            distractors, args.max_distractors))
    pairs = build_training_pairs(
        gt.groups, db, negatives_per_positive=args.negatives_per_positive,
        seed=args.seed, distractor_ids=distractors)
    raw = train_linear(pairs, TrainConfig(reg_lambda=args.reg_lambda,
                                          epochs=args.epochs, seed=args.seed))
    profile = finalize_weights(raw)
    save_profile(profile, args.output)
    accuracy = training_accuracy(pairs, raw)
    print(f"trained on {len(pairs)} pairs, training accuracy {accuracy:.3f} "
          f"-> {args.output}")
    return 0


def _config_value(doc: dict, key: str, default):
    return doc[key] if key in doc else default


def cmd_evaluate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    base = os.path.dirname(os.path.abspath(args.config))

    def resolve(path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(base, path)

    db = load(resolve(doc["database"]))
    gt = GroundTruth.load(resolve(doc["ground_truth"]))
    seed = _config_value(doc, "seed", 0)
    counts = doc.get("distractor_counts") or [doc.get("distractor_count", 1000)]
    selection = SelectionConfig(t_uniq=_config_value(doc, "t_uniq", 0.15),
                                n_samp=_config_value(doc, "n_samp", 200))
    reports = []
    for raw_config in doc.get("configurations", ["equal-all"]):
        for count in counts:
            cfg = EvalConfig(distractor_count=count, seed=seed,
                             trials=_config_value(doc, "trials", 10),
                             folds=_config_value(doc, "folds", 0),
                             negatives_per_positive=_config_value(
                                 doc, "negatives_per_positive", 3),
                             selection=selection)
            if isinstance(raw_config, dict):
                if "solo" in raw_config:
                    cfg.configuration = "solo"
                    cfg.solo_class = raw_config["solo"]
                elif "svm-weights-cross" in raw_config:
                    cfg.configuration = "svm-weights-cross"
                    cfg.profile = load_profile(resolve(raw_config["svm-weights-cross"]))
                else:
                    raise UsageError(f"bad configuration entry {raw_config!r}")
            else:
                cfg.configuration = str(raw_config)
            reports.append(run_benchmark(gt, db, cfg))

    text = _format_reports(reports, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _format_reports(reports, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"schema_version": OUTPUT_SCHEMA_VERSION,
                           "reports": [r.to_json() for r in reports]},
                          indent=1, sort_keys=True) + "\n"
    rows = report_rows(reports)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    widths = {key: max(len(key), *(len(str(row[key])) for row in rows))
              for key in rows[0]}
    lines = ["  ".join(key.ljust(widths[key]) for key in rows[0])]
    for row in rows:
        lines.append("  ".join(str(row[key]).ljust(widths[key]) for key in row))
    return "\n".join(lines) + "\n"


def format_tree(tree: LabeledTree | None) -> str:
    if tree is None:
        return "(empty)"
    if not tree.children:
        return tree.label
    return f"{tree.label}({', '.join(format_tree(c) for c in tree.children)})"


def cmd_inspect(args) -> int:
    db = _open_db(args)
    if args.record_id not in db:
        raise UsageError(f"no record {args.record_id!r} in the database")
    record = db.get(args.record_id)
    if args.format == "json":
        from .store import _record_to_json
        json.dump(_record_to_json(record), sys.stdout, indent=1, sort_keys=True)
        print()
        return 0
    print(f"id:       {record.id}")
    print(f"name:     {record.name}")
    print(f"path:     {record.path}:{record.line}")
    print(f"project:  {record.project_id}")
    if record.distractor:
        print("distractor: true")
    for class_id in FEATURE_CLASSES:
        obs = record.feature_vector[class_id]
        print(f"{class_id}: {_format_observation(obs)}")
    return 0


def _format_observation(obs) -> str:
    value = obs.value
    if value is None or isinstance(value, LabeledTree):
        return format_tree(value)
    if isinstance(value, frozenset):
        items = sorted(str(v) for v in value)
        return "{" + ", ".join(items) + "}"
    if isinstance(value, dict):
        parts = [f"{k}: {v:.3f}" if isinstance(v, float) else f"{k}: {v}"
                 for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))]
        return "{" + ", ".join(parts) + "}"
    return repr(value)


if __name__ == "__main__":
    sys.exit(main())
