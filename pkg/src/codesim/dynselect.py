"""Per-query dynamic feature-class selection.

Offline, a random sample of database vectors yields one similarity threshold
per class (mean + population standard deviation of all pairwise scores).
Online, a class is selected (weight 1.0) when the query's observation is
similar to less than t_uniq of the sample under that threshold, i.e. when it
is distinctive; otherwise the class is dropped (weight 0.0).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .errors import DatabaseFormatError, SampleTooLargeError
from .features import FEATURE_CLASSES, N_CLASSES, FeatureVector
from .similarity import PreparedSlot, prepare_vector, prepared_similarity
from .store import CodeDatabase
from .weights import WeightProfile


@dataclass(frozen=True)
class SelectionConfig:
    t_uniq: float = 0.15
    n_samp: int = 200

    def __post_init__(self):
        if not 0.0 < self.t_uniq <= 1.0:
            raise ValueError("t_uniq must be in (0, 1]")
        if self.n_samp < 2:
            raise ValueError("n_samp must be at least 2")


@dataclass
class SamplePool:
    ids: list[str]
    vectors: list[tuple[PreparedSlot, ...]]
    seed: int

    def __len__(self) -> int:
        return len(self.ids)


ClassThresholds = tuple  # one threshold per feature-class, slot order


def draw_sample(db: CodeDatabase, n_samp: int, seed: int,
                ids=None) -> SamplePool:
    """Uniform sample without replacement, reproducible from the seed.

    `ids` restricts the pool to a subset of the database (used by the
    evaluation harness); default is the whole database.
    """
    pool_ids = sorted(ids) if ids is not None else sorted(db.ids())
    if n_samp > len(pool_ids):
        raise SampleTooLargeError(
            f"sample of {n_samp} from {len(pool_ids)} records")
    chosen = random.Random(seed).sample(pool_ids, n_samp)
    return SamplePool(ids=chosen, vectors=[db.prepared(rid) for rid in chosen],
                      seed=seed)


def class_thresholds(pool: SamplePool) -> ClassThresholds:
    """Per-class mean + population stddev over all pairwise sample scores.

    Thresholds may exceed 1.0, in which case nothing counts as similar for
    that class.
    """
    n = len(pool)
    if n < 2:
        raise ValueError("threshold estimation needs a sample of at least 2")
    sums = [0.0] * N_CLASSES
    squares = [0.0] * N_CLASSES
    memo: dict = {}
    for i in range(n):
        vi = pool.vectors[i]
        for j in range(i + 1, n):
            vj = pool.vectors[j]
            for c in range(N_CLASSES):
                a, b = vi[c], vj[c]
                key = (c, a.key, b.key)
                sim = memo.get(key)
                if sim is None:
                    sim = prepared_similarity(a, b)
                    memo[key] = sim
                    memo[(c, b.key, a.key)] = sim
                sums[c] += sim
                squares[c] += sim * sim
    pairs = n * (n - 1) // 2
    thresholds = []
    for c in range(N_CLASSES):
        mean = sums[c] / pairs
        variance = max(squares[c] / pairs - mean * mean, 0.0)
        thresholds.append(mean + math.sqrt(variance))
    return tuple(thresholds)


def select_classes(query: FeatureVector | tuple, pool: SamplePool,
                   thresholds: ClassThresholds,
                   config: SelectionConfig = SelectionConfig(),
                   exclude_id: str | None = None) -> WeightProfile:
    """Binary per-class weights for one query.

    Counts sample members whose per-class score against the query is strictly
    above the class threshold; the class is kept when that fraction is below
    t_uniq. If every class is dropped, falls back to equal weights with the
    profile's fallback flag set.
    """
    prepared = query if isinstance(query, tuple) else prepare_vector(query)
    members = [vec for rid, vec in zip(pool.ids, pool.vectors) if rid != exclude_id]
    if not members:
        return WeightProfile.equal()
    counts = [0] * N_CLASSES
    for vec in members:
        for c in range(N_CLASSES):
            if prepared_similarity(prepared[c], vec[c]) > thresholds[c]:
                counts[c] += 1
    n_eff = len(members)
    values = tuple(1.0 if counts[c] / n_eff < config.t_uniq else 0.0
                   for c in range(N_CLASSES))
    if not any(values):
        return WeightProfile(values=(1.0,) * N_CLASSES, fallback=True)
    return WeightProfile(values=values)


# ----------------------------------------------------------------------
# threshold sidecar cache
# ----------------------------------------------------------------------

def save_thresholds(path: str, db: CodeDatabase, pool: SamplePool,
                    thresholds: ClassThresholds) -> None:
    doc = {
        "db_digest": db.digest(),
        "seed": pool.seed,
        "n_samp": len(pool),
        "thresholds": dict(zip(FEATURE_CLASSES, thresholds)),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=1, sort_keys=True)
        handle.write("\n")


def load_thresholds(path: str, db: CodeDatabase) -> tuple[SamplePool, ClassThresholds]:
    """Load a sidecar and re-draw its sample; rejects stale caches."""
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    try:
        if doc["db_digest"] != db.digest():
            raise DatabaseFormatError("thresholds sidecar was built for a different database")
        pool = draw_sample(db, int(doc["n_samp"]), int(doc["seed"]))
        thresholds = tuple(float(doc["thresholds"][cid]) for cid in FEATURE_CLASSES)
    except KeyError as exc:
        raise DatabaseFormatError(f"bad thresholds sidecar: missing {exc}") from exc
    return pool, thresholds
