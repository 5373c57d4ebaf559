"""Per-feature-class similarity functions and the combined weighted score.

All scores are in [0, 1]. Conventions: two empty observations compare as 1.0,
an empty vs a non-empty observation as 0.0 (identical featureless functions
must score 1.0).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Mapping, Sequence

from .errors import KindMismatchError, ZeroWeightSumError
from .features import (
    FEATURE_CLASSES, N_CLASSES, PAIR_SET, SHAPE_MULTISET, TERM_SET, TREE,
    TYPE_MULTISET, WEIGHTED_TERMS, FeatureVector, LabeledTree, Observation,
    tree_postorder, tree_preorder, tree_size,
)


@dataclass(frozen=True)
class TreeDistanceConfig:
    """Size-ratio short-circuit threshold for the tree distance."""

    distance_threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.distance_threshold <= 1.0:
            raise ValueError("distance threshold must be in (0, 1]")


DEFAULT_TREE_CONFIG = TreeDistanceConfig()

SimilarityVector = tuple  # 16 floats, FEATURE_CLASSES order


def jaccard(s1: frozenset, s2: frozenset) -> float:
    """|intersection| / |union|; two empty sets are fully similar."""
    if not s1 and not s2:
        return 1.0
    return len(s1 & s2) / len(s1 | s2)


def generalized_jaccard(m1: Mapping, m2: Mapping) -> float:
    """Multiset overlap: sum of per-element min counts over max counts."""
    if not m1 and not m2:
        return 1.0
    total1 = sum(m1.values())
    total2 = sum(m2.values())
    small, large = (m1, m2) if len(m1) <= len(m2) else (m2, m1)
    shared = sum(min(count, large[elem]) for elem, count in small.items() if elem in large)
    return shared / (total1 + total2 - shared)


def cosine_weighted(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Cosine over the sparse union of terms; equal maps score exactly 1.0."""
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    if a == b:
        return 1.0
    dot = sum(a[term] * b[term] for term in sorted(a.keys() & b.keys()))
    if dot == 0.0:
        return 0.0
    norm_a = sqrt(sum(v * v for v in a.values()))
    norm_b = sqrt(sum(v * v for v in b.values()))
    return dot / (norm_a * norm_b)


def sequence_edit_distance(s1: Sequence[str], s2: Sequence[str]) -> int:
    """Levenshtein distance over label tokens, unit costs."""
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    if not s2:
        return len(s1)
    prev = list(range(len(s2) + 1))
    for i, tok1 in enumerate(s1, 1):
        cur = [i]
        for j, tok2 in enumerate(s2, 1):
            cur.append(min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (tok1 != tok2),
            ))
        prev = cur
    return prev[-1]


def prepare_tree(tree: LabeledTree | None) -> tuple[int, tuple, tuple] | None:
    """Cacheable traversal form: (size, preorder, postorder)."""
    if tree is None:
        return None
    return (tree_size(tree), tree_preorder(tree), tree_postorder(tree))


def _tree_similarity_prepared(p1, p2, threshold: float) -> float:
    if p1 is None and p2 is None:
        return 1.0
    if p1 is None or p2 is None:
        return 0.0
    size1, pre1, post1 = p1
    size2, pre2, post2 = p2
    larger = max(size1, size2)
    rough = abs(size1 - size2) / larger
    if rough >= threshold:
        return 1.0 - rough
    refined = max(
        sequence_edit_distance(pre1, pre2),
        sequence_edit_distance(post1, post2),
    ) / larger
    return 1.0 - refined


def tree_similarity(t1: LabeledTree | None, t2: LabeledTree | None,
                    config: TreeDistanceConfig = DEFAULT_TREE_CONFIG) -> float:
    """1 - approximate tree edit distance, normalized by the larger size.

    When one tree is at least twice the size of the other, only the size
    ratio is used; otherwise the distance is the max of the preorder and
    postorder label edit distances (an under-approximation of tree edit
    distance).
    """
    return _tree_similarity_prepared(prepare_tree(t1), prepare_tree(t2),
                                     config.distance_threshold)


# ----------------------------------------------------------------------
# prepared vectors (the scan-time fast path)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PreparedSlot:
    """Precomputed comparison form of one observation.

    `key` is hashable and value-identifying, usable for per-query memoization;
    `data` holds whatever the kind's similarity needs.
    """

    kind: str
    key: object
    data: object


def prepare_observation(obs: Observation) -> PreparedSlot:
    kind = obs.kind
    if kind in (TERM_SET, PAIR_SET):
        value = frozenset(obs.value)
        return PreparedSlot(kind, value, value)
    if kind in (SHAPE_MULTISET, TYPE_MULTISET):
        items = tuple(sorted(obs.value.items()))
        return PreparedSlot(kind, items, dict(obs.value))
    if kind == TREE:
        prepared = prepare_tree(obs.value)
        return PreparedSlot(kind, prepared, prepared)
    if kind == WEIGHTED_TERMS:
        items = tuple(sorted(obs.value.items()))
        return PreparedSlot(kind, items, dict(obs.value))
    raise KindMismatchError(f"unknown observation kind {kind!r}")


def prepare_vector(fv: FeatureVector) -> tuple[PreparedSlot, ...]:
    return tuple(prepare_observation(obs) for obs in fv.slots)


def prepared_similarity(a: PreparedSlot, b: PreparedSlot,
                        tree_threshold: float = DEFAULT_TREE_CONFIG.distance_threshold) -> float:
    if a.kind != b.kind:
        raise KindMismatchError(f"cannot compare {a.kind!r} with {b.kind!r}")
    kind = a.kind
    if kind in (TERM_SET, PAIR_SET):
        return jaccard(a.data, b.data)
    if kind in (SHAPE_MULTISET, TYPE_MULTISET):
        return generalized_jaccard(a.data, b.data)
    if kind == TREE:
        return _tree_similarity_prepared(a.data, b.data, tree_threshold)
    return cosine_weighted(a.data, b.data)


def similarity_vector(a: FeatureVector, b: FeatureVector,
                      tree_config: TreeDistanceConfig = DEFAULT_TREE_CONFIG) -> SimilarityVector:
    """Per-class similarity scores between two feature vectors, slot order."""
    pa, pb = prepare_vector(a), prepare_vector(b)
    return prepared_similarity_vector(pa, pb, tree_config.distance_threshold)


def prepared_similarity_vector(pa: Sequence[PreparedSlot], pb: Sequence[PreparedSlot],
                               tree_threshold: float = DEFAULT_TREE_CONFIG.distance_threshold,
                               ) -> SimilarityVector:
    return tuple(prepared_similarity(a, b, tree_threshold) for a, b in zip(pa, pb))


def combined_similarity(sims: Sequence[float], weights) -> float:
    """Weighted average of per-class scores (the ranking score).

    `weights` is any iterable of 16 non-negative reals (WeightProfile
    iterates its values). Raises ZeroWeightSumError when all weights are 0.
    """
    w = tuple(weights)
    if len(w) != N_CLASSES:
        raise ValueError(f"expected {N_CLASSES} weights, got {len(w)}")
    total = 0.0
    acc = 0.0
    for sim, weight in zip(sims, w):
        if weight:
            acc += sim * weight
            total += weight
    if total <= 0.0:
        raise ZeroWeightSumError("all feature-class weights are zero")
    return acc / total


def class_similarity(class_id: str, a: Observation, b: Observation) -> float:
    """Similarity for one named feature-class (convenience/debugging)."""
    if class_id not in FEATURE_CLASSES:
        raise ValueError(f"unknown feature-class {class_id!r}")
    return prepared_similarity(prepare_observation(a), prepare_observation(b))
