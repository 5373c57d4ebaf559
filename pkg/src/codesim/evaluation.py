"""Information-retrieval evaluation: ground-truth groups, distractor mixing,
configuration runs, and AP/MAP reporting.

For every query drawn from a group, the search set is that query's group
mates plus the sampled distractors; the query never appears in its own
search set. Rankings are full scans, so AP is computed over the complete
ordering.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dynselect import SelectionConfig, class_thresholds, draw_sample, select_classes
from .errors import (
    EmptyRelevantSetError, InsufficientDistractorsError, MissingIdError,
    TooManyFoldsError,
)
from .features import FEATURE_CLASSES
from .store import CodeDatabase, top_k
from .weights import (
    TrainConfig, WeightProfile, build_training_pairs, finalize_weights,
    train_linear,
)

CONFIGURATION_NAMES = (
    "solo", "equal-all", "dyn-select", "rand-select", "svm-weights",
    "svm-weights-cross",
)


@dataclass
class GroundTruth:
    domain: str
    groups: dict[str, list[str]]

    def validate(self) -> None:
        seen: set[str] = set()
        for name, members in self.groups.items():
            if len(members) < 2:
                raise ValueError(f"group {name!r} needs at least 2 members")
            overlap = seen & set(members)
            if overlap:
                raise ValueError(f"groups overlap on {sorted(overlap)}")
            seen.update(members)

    @classmethod
    def load(cls, path: str) -> "GroundTruth":
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
        gt = cls(domain=doc.get("domain", ""), groups={
            str(name): [str(m) for m in members]
            for name, members in doc["groups"].items()
        })
        gt.validate()
        return gt

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"domain": self.domain, "groups": self.groups},
                      handle, indent=1, sort_keys=True)
            handle.write("\n")


@dataclass
class EvalConfig:
    configuration: str = "equal-all"
    solo_class: str | None = None
    profile: WeightProfile | None = None  # svm-weights-cross input
    distractor_count: int = 1000
    seed: int = 0
    trials: int = 10  # rand-select repetitions
    folds: int = 0  # 0 = leave-one-group-out
    negatives_per_positive: int = 3
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def describe(self) -> str:
        if self.configuration == "solo":
            return f"solo-{self.solo_class}"
        return self.configuration


@dataclass
class QueryResult:
    query_id: str
    ap: float


@dataclass
class EvalReport:
    configuration: str
    distractor_count: int
    per_query: list[QueryResult]
    map_score: float
    elapsed_s: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "configuration": self.configuration,
            "distractor_count": self.distractor_count,
            "map": self.map_score,
            "elapsed_s": self.elapsed_s,
            "per_query": [{"query": q.query_id, "ap": q.ap} for q in self.per_query],
            "details": self.details,
        }


def average_precision(ranked: Sequence[str], relevant: Iterable[str],
                      n_total: int | None = None) -> float:
    """Mean of precision-at-k over the ranks where relevant items appear,
    divided by the number of relevant items R; 1.0 iff the top R ranks are
    exactly the relevant items."""
    relevant_set = set(relevant)
    if not relevant_set:
        raise EmptyRelevantSetError("no relevant documents for this query")
    hits = 0
    acc = 0.0
    limit = len(ranked) if n_total is None else min(n_total, len(ranked))
    for rank, doc_id in enumerate(ranked[:limit], start=1):
        if doc_id in relevant_set:
            hits += 1
            acc += hits / rank
    return acc / len(relevant_set)


def kfold_split(gt: GroundTruth, folds: int, seed: int = 0,
                ) -> list[tuple[dict[str, list[str]], dict[str, list[str]]]]:
    """Partition by group (a group is never split across train and test)."""
    names = sorted(gt.groups)
    if folds > len(names):
        raise TooManyFoldsError(f"{folds} folds for {len(names)} groups")
    if folds < 2:
        raise ValueError("need at least 2 folds")
    shuffled = names[:]
    random.Random(seed).shuffle(shuffled)
    buckets: list[list[str]] = [[] for _ in range(folds)]
    for i, name in enumerate(shuffled):
        buckets[i % folds].append(name)
    splits = []
    for i in range(folds):
        test = {name: gt.groups[name] for name in sorted(buckets[i])}
        train = {name: gt.groups[name] for j, bucket in enumerate(buckets)
                 for name in sorted(bucket) if j != i}
        splits.append((train, test))
    return splits


def _stable_rng(*parts) -> random.Random:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_distractors(db: CodeDatabase, count: int, seed: int) -> list[str]:
    pool = sorted(r.id for r in db if r.distractor)
    if count > len(pool):
        raise InsufficientDistractorsError(
            f"requested {count} distractors, pool has {len(pool)}")
    return sorted(random.Random(seed).sample(pool, count))


def run_benchmark(gt: GroundTruth, db: CodeDatabase, cfg: EvalConfig) -> EvalReport:
    """Evaluate one configuration at one distractor level."""
    gt.validate()
    started = time.monotonic()
    for members in gt.groups.values():
        for member in members:
            if member not in db:
                raise MissingIdError(f"ground-truth id {member!r} is not indexed")
    distractors = sample_distractors(db, cfg.distractor_count, cfg.seed)
    details: dict = {}

    if cfg.configuration == "rand-select":
        per_query = _run_rand_select(gt, db, cfg, distractors)
    elif cfg.configuration == "svm-weights":
        per_query, details = _run_svm_folds(gt, db, cfg, distractors)
    else:
        resolver = _weight_resolver(gt, db, cfg, distractors, details)
        per_query = []
        for group_name in sorted(gt.groups):
            members = gt.groups[group_name]
            for query_id in sorted(members):
                mates = [m for m in sorted(members) if m != query_id]
                weights = resolver(query_id)
                ap = _query_ap(db, query_id, mates, distractors, weights)
                per_query.append(QueryResult(query_id, ap))

    map_score = sum(q.ap for q in per_query) / len(per_query)
    return EvalReport(
        configuration=cfg.describe(),
        distractor_count=cfg.distractor_count,
        per_query=per_query,
        map_score=map_score,
        elapsed_s=time.monotonic() - started,
        details=details,
    )


def _query_ap(db: CodeDatabase, query_id: str, mates: list[str],
              distractors: list[str], weights) -> float:
    candidates = mates + [d for d in distractors if d != query_id]
    ranked = top_k(db, db.get(query_id).feature_vector, weights,
                   k=len(candidates), candidate_ids=candidates)
    return average_precision(ranked.ids(), mates)


def _weight_resolver(gt: GroundTruth, db: CodeDatabase, cfg: EvalConfig,
                     distractors: list[str], details: dict):
    if cfg.configuration == "equal-all":
        profile = WeightProfile.equal()
        return lambda query_id: profile
    if cfg.configuration == "solo":
        if cfg.solo_class not in FEATURE_CLASSES:
            raise ValueError(f"unknown solo feature-class {cfg.solo_class!r}")
        profile = WeightProfile.solo(cfg.solo_class)
        return lambda query_id: profile
    if cfg.configuration == "svm-weights-cross":
        if cfg.profile is None:
            raise ValueError("svm-weights-cross needs a foreign weight profile")
        return lambda query_id: cfg.profile
    if cfg.configuration == "dyn-select":
        universe = sorted({m for members in gt.groups.values() for m in members}
                          | set(distractors))
        n_samp = min(cfg.selection.n_samp, len(universe))
        pool = draw_sample(db, n_samp, cfg.seed, ids=universe)
        thresholds = class_thresholds(pool)
        details["thresholds"] = dict(zip(FEATURE_CLASSES, thresholds))
        fallbacks = details.setdefault("fallback_queries", [])

        def resolve(query_id: str) -> WeightProfile:
            profile = select_classes(db.prepared(query_id), pool, thresholds,
                                     cfg.selection, exclude_id=query_id)
            if profile.fallback:
                fallbacks.append(query_id)
            return profile

        return resolve
    raise ValueError(f"unknown configuration {cfg.configuration!r}")


def _run_rand_select(gt: GroundTruth, db: CodeDatabase, cfg: EvalConfig,
                     distractors: list[str]) -> list[QueryResult]:
    """Random non-empty class subsets, mean AP over cfg.trials trials."""
    per_query = []
    for group_name in sorted(gt.groups):
        members = gt.groups[group_name]
        for query_id in sorted(members):
            mates = [m for m in sorted(members) if m != query_id]
            total = 0.0
            for trial in range(cfg.trials):
                rng = _stable_rng("rand-select", cfg.seed, trial, query_id)
                size = rng.randint(1, len(FEATURE_CLASSES))
                chosen = set(rng.sample(range(len(FEATURE_CLASSES)), size))
                weights = WeightProfile(tuple(
                    1.0 if i in chosen else 0.0
                    for i in range(len(FEATURE_CLASSES))))
                total += _query_ap(db, query_id, mates, distractors, weights)
            per_query.append(QueryResult(query_id, total / cfg.trials))
    return per_query


def _run_svm_folds(gt: GroundTruth, db: CodeDatabase, cfg: EvalConfig,
                   distractors: list[str]) -> tuple[list[QueryResult], dict]:
    """Fold-wise train/test within the domain; weights learned per fold."""
    folds = cfg.folds or len(gt.groups)
    splits = kfold_split(gt, folds, cfg.seed)
    per_query = []
    fold_profiles = {}
    for fold_idx, (train_groups, test_groups) in enumerate(splits):
        pairs = build_training_pairs(
            train_groups, db,
            negatives_per_positive=cfg.negatives_per_positive,
            seed=cfg.seed + fold_idx,
            distractor_ids=distractors,
        )
        profile = finalize_weights(train_linear(pairs, cfg.train))
        fold_profiles[fold_idx] = profile.to_dict()
        for group_name in sorted(test_groups):
            members = test_groups[group_name]
            for query_id in sorted(members):
                mates = [m for m in sorted(members) if m != query_id]
                ap = _query_ap(db, query_id, mates, distractors, profile)
                per_query.append(QueryResult(query_id, ap))
    per_query.sort(key=lambda q: q.query_id)
    return per_query, {"folds": folds, "fold_profiles": fold_profiles}


def report_rows(reports: Iterable[EvalReport]) -> list[dict]:
    """Flat rows (configuration x distractor count) for CSV output."""
    return [
        {"configuration": r.configuration,
         "distractors": r.distractor_count,
         "queries": len(r.per_query),
         "map": round(r.map_score, 6),
         "elapsed_s": round(r.elapsed_s, 3)}
        for r in reports
    ]
