"""Feature-class weight profiles, including ones learned from labeled pairs.

A linear max-margin classifier is trained on similarity vectors of labeled
similar/dissimilar function pairs; its coefficients, normalized by the sum of
their magnitudes with negatives truncated, become the per-class weights.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    AllNonPositiveError, DegenerateDataError, GroupTooSmallError,
    MissingIdError,
)
from .features import CLASS_INDEX, FEATURE_CLASSES, N_CLASSES
from .similarity import prepared_similarity_vector
from .store import CodeDatabase


@dataclass(frozen=True)
class WeightProfile:
    """Per-class weights in [0, 1] driving the combined similarity."""

    values: tuple[float, ...]
    fallback: bool = False  # set when dyn-select fell back to equal weights

    def __post_init__(self):
        if len(self.values) != N_CLASSES:
            raise ValueError(f"expected {N_CLASSES} weights")

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, class_id: str) -> float:
        return self.values[CLASS_INDEX[class_id]]

    def to_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_CLASSES, self.values))

    @classmethod
    def from_dict(cls, mapping: dict[str, float]) -> "WeightProfile":
        unknown = set(mapping) - set(FEATURE_CLASSES)
        if unknown:
            raise ValueError(f"unknown feature-classes: {sorted(unknown)}")
        return cls(tuple(float(mapping.get(cid, 0.0)) for cid in FEATURE_CLASSES))

    @classmethod
    def equal(cls) -> "WeightProfile":
        return cls((1.0,) * N_CLASSES)

    @classmethod
    def solo(cls, class_id: str) -> "WeightProfile":
        values = [0.0] * N_CLASSES
        values[CLASS_INDEX[class_id]] = 1.0
        return cls(tuple(values))


def save_profile(profile: WeightProfile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(profile.to_dict(), handle, indent=1, sort_keys=True)
        handle.write("\n")


def load_profile(path: str) -> WeightProfile:
    with open(path, "r", encoding="utf-8") as handle:
        return WeightProfile.from_dict(json.load(handle))


# ----------------------------------------------------------------------
# training data
# ----------------------------------------------------------------------

@dataclass
class LabeledPair:
    sims: tuple  # similarity vector of the pair
    label: int  # 1 similar, 0 dissimilar


@dataclass(frozen=True)
class RawWeights:
    coefficients: tuple[float, ...]
    bias: float


@dataclass(frozen=True)
class TrainConfig:
    reg_lambda: float = 0.01
    epochs: int = 400
    seed: int = 0


def build_training_pairs(groups: dict[str, Sequence[str]], db: CodeDatabase,
                         negatives_per_positive: int = 3, seed: int = 0,
                         distractor_ids: Iterable[str] | None = None) -> list[LabeledPair]:
    """Intra-group pairs labeled 1; sampled cross-group/distractor pairs 0.

    Deterministic for a given seed. Raises GroupTooSmallError for singleton
    groups and MissingIdError for ids absent from the database.
    """
    for name, members in groups.items():
        if len(members) < 2:
            raise GroupTooSmallError(f"group {name!r} has {len(members)} member(s)")
    member_ids = [mid for _, members in sorted(groups.items()) for mid in sorted(members)]
    for mid in member_ids:
        if mid not in db:
            raise MissingIdError(f"ground-truth id {mid!r} is not indexed")

    def sims_for(a: str, b: str) -> tuple:
        return prepared_similarity_vector(db.prepared(a), db.prepared(b))

    pairs = []
    for _, members in sorted(groups.items()):
        for a, b in combinations(sorted(members), 2):
            pairs.append(LabeledPair(sims_for(a, b), 1))

    group_of = {mid: name for name, members in groups.items() for mid in members}
    others = sorted(set(distractor_ids or ()))
    for oid in others:
        if oid not in db:
            raise MissingIdError(f"distractor id {oid!r} is not indexed")
    rng = random.Random(seed)
    wanted = negatives_per_positive * len(pairs)
    pool = member_ids + others
    seen: set[tuple[str, str]] = set()
    attempts = 0
    while len(seen) < wanted and attempts < wanted * 20:
        attempts += 1
        a = member_ids[rng.randrange(len(member_ids))]
        b = pool[rng.randrange(len(pool))]
        if a == b or group_of.get(a) == group_of.get(b):
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            continue
        seen.add(key)
    negatives = [LabeledPair(sims_for(a, b), 0) for a, b in sorted(seen)]
    return pairs + negatives


# ----------------------------------------------------------------------
# training
# ----------------------------------------------------------------------

def train_linear(pairs: Sequence[LabeledPair],
                 config: TrainConfig = TrainConfig()) -> RawWeights:
    """Subgradient descent on L2-regularized hinge loss (batch, zero init).

    Deterministic: same pairs and config always give the same coefficients.
    """
    labels = {pair.label for pair in pairs}
    if labels != {0, 1}:
        raise DegenerateDataError(f"training needs both labels, got {sorted(labels)}")
    features = np.array([pair.sims + (1.0,) for pair in pairs], dtype=np.float64)
    signs = np.array([1.0 if pair.label else -1.0 for pair in pairs])
    count = len(pairs)
    lam = config.reg_lambda
    w = np.zeros(N_CLASSES + 1)
    for step in range(1, config.epochs + 1):
        margins = signs * (features @ w)
        violating = margins < 1.0
        grad = lam * w
        if violating.any():
            grad = grad - (signs[violating, None] * features[violating]).sum(axis=0) / count
        w = w - grad / (lam * step)
    return RawWeights(tuple(float(c) for c in w[:N_CLASSES]), float(w[N_CLASSES]))


def training_accuracy(pairs: Sequence[LabeledPair], raw: RawWeights) -> float:
    features = np.array([pair.sims + (1.0,) for pair in pairs], dtype=np.float64)
    w = np.array(raw.coefficients + (raw.bias,))
    predicted = (features @ w) >= 0.0
    actual = np.array([bool(pair.label) for pair in pairs])
    return float((predicted == actual).mean())


def finalize_weights(raw: RawWeights) -> WeightProfile:
    """Normalize by the sum of magnitudes, then truncate negatives; the bias
    is discarded. Raises AllNonPositiveError when no coefficient is positive.
    """
    coefficients = raw.coefficients
    if max(coefficients) <= 0.0:
        raise AllNonPositiveError("no positive classifier coefficient")
    denom = sum(abs(c) for c in coefficients)
    return WeightProfile(tuple(max(c, 0.0) / denom for c in coefficients))
