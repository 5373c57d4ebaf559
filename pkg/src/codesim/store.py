"""The code database: persistent (metadata, feature-vector) records with
k-most-similar search.

Search is an exhaustive scan: every record is compared to the query with the
combined similarity, and a bounded priority queue keeps the k best. Records
can be partitioned into shards whose partial top-k lists are merged
deterministically, so shard scans may run concurrently.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import multiprocessing
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import DB_FORMAT_VERSION, EXTRACTOR_VERSION
from .errors import (
    DatabaseFormatError, DuplicateIdError, VersionMismatchError,
    ZeroWeightSumError,
)
from .features import (
    CLASS_KINDS, FEATURE_CLASSES, N_CLASSES, PAIR_SET, SHAPE_MULTISET,
    TERM_SET, TREE, TYPE_MULTISET, WEIGHTED_TERMS, FeatureVector, IdfTable,
    LabeledTree, Observation,
)
from .similarity import PreparedSlot, prepare_vector, prepared_similarity


@dataclass
class FunctionRecord:
    id: str
    name: str
    path: str
    line: int
    project_id: str
    feature_vector: FeatureVector
    source_text: str | None = None
    distractor: bool = False


@dataclass
class RankedEntry:
    id: str
    score: float
    sims: tuple  # per-class breakdown, FEATURE_CLASSES order


@dataclass
class RankedList:
    entries: list[RankedEntry]
    k_requested: int

    def ids(self) -> list[str]:
        return [entry.id for entry in self.entries]


class CodeDatabase:
    """Insertion-ordered collection of FunctionRecord, immutable after build."""

    def __init__(self, meta: dict | None = None):
        self.meta = meta or {}
        self._records: dict[str, FunctionRecord] = {}
        self._prepared: dict[str, tuple[PreparedSlot, ...]] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    def __iter__(self) -> Iterator[FunctionRecord]:
        return iter(self._records.values())

    def ids(self) -> list[str]:
        return list(self._records)

    def get(self, record_id: str) -> FunctionRecord:
        return self._records[record_id]

    def insert(self, record: FunctionRecord) -> None:
        if record.id in self._records:
            raise DuplicateIdError(f"duplicate record id {record.id!r}")
        self._records[record.id] = record
        self._prepared[record.id] = prepare_vector(record.feature_vector)

    def prepared(self, record_id: str) -> tuple[PreparedSlot, ...]:
        return self._prepared[record_id]

    def digest(self) -> str:
        """Content key for sidecar caches (thresholds etc.)."""
        h = hashlib.sha256()
        h.update(EXTRACTOR_VERSION.encode())
        for record_id in sorted(self._records):
            h.update(record_id.encode())
            h.update(b"\0")
        return h.hexdigest()

    def corpus_idf(self) -> IdfTable:
        """Corpus-wide IDF recorded at build time (used for ad-hoc queries)."""
        raw = self.meta.get("corpus_idf", {})
        return IdfTable("*", raw.get("doc_count", 0), dict(raw.get("df", {})))


# ----------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------

def _encode_observation(obs: Observation):
    kind, value = obs.kind, obs.value
    if kind in (TERM_SET,):
        return sorted(value)
    if kind == PAIR_SET:
        return [list(pair) for pair in sorted(value)]
    if kind in (SHAPE_MULTISET, TYPE_MULTISET):
        return {str(k): v for k, v in value.items()}
    if kind == TREE:
        return _encode_tree(value)
    if kind == WEIGHTED_TERMS:
        return dict(value)
    raise DatabaseFormatError(f"unknown observation kind {kind!r}")


def _encode_tree(tree: LabeledTree | None):
    if tree is None:
        return None
    return [tree.label, [_encode_tree(child) for child in tree.children]]


def _decode_tree(data) -> LabeledTree | None:
    if data is None:
        return None
    label, children = data
    return LabeledTree(label, tuple(_decode_tree(child) for child in children))


def _decode_observation(class_id: str, data) -> Observation:
    kind = CLASS_KINDS[class_id]
    if kind == TERM_SET:
        return Observation(kind, frozenset(data))
    if kind == PAIR_SET:
        return Observation(kind, frozenset(tuple(pair) for pair in data))
    if kind == SHAPE_MULTISET:
        return Observation(kind, {int(k): v for k, v in data.items()})
    if kind == TYPE_MULTISET:
        return Observation(kind, dict(data))
    if kind == TREE:
        return Observation(kind, _decode_tree(data))
    return Observation(kind, {str(k): float(v) for k, v in data.items()})


def _record_to_json(record: FunctionRecord) -> dict:
    features = {
        class_id: _encode_observation(obs)
        for class_id, obs in zip(FEATURE_CLASSES, record.feature_vector.slots)
    }
    doc = {
        "id": record.id,
        "name": record.name,
        "path": record.path,
        "line": record.line,
        "project_id": record.project_id,
        "features": features,
    }
    if record.source_text is not None:
        doc["source_text"] = record.source_text
    if record.distractor:
        doc["distractor"] = True
    return doc


def _record_from_json(doc: dict) -> FunctionRecord:
    record_id = doc.get("id", "<missing id>")
    try:
        features = doc["features"]
        slots = tuple(_decode_observation(cid, features[cid]) for cid in FEATURE_CLASSES)
        return FunctionRecord(
            id=doc["id"],
            name=doc["name"],
            path=doc["path"],
            line=doc["line"],
            project_id=doc["project_id"],
            feature_vector=FeatureVector(slots),
            source_text=doc.get("source_text"),
            distractor=bool(doc.get("distractor", False)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DatabaseFormatError(str(exc), record_id=record_id) from exc


def save(db: CodeDatabase, path: str) -> None:
    """Write the database as one JSON document.

    Floats serialize via Python's shortest round-trip repr, so load(save(db))
    is bit-exact.
    """
    meta = dict(db.meta)
    meta["format_version"] = DB_FORMAT_VERSION
    meta["extractor_version"] = EXTRACTOR_VERSION
    doc = {"meta": meta, "functions": [_record_to_json(r) for r in db]}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load(path: str) -> CodeDatabase:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DatabaseFormatError(f"not a valid database file: {exc}") from exc
    if not isinstance(doc, dict) or "meta" not in doc or "functions" not in doc:
        raise DatabaseFormatError("missing 'meta' or 'functions' section")
    meta = doc["meta"]
    if meta.get("format_version") != DB_FORMAT_VERSION:
        raise DatabaseFormatError(f"unsupported format_version {meta.get('format_version')!r}")
    if meta.get("extractor_version") != EXTRACTOR_VERSION:
        raise VersionMismatchError(
            f"database built by extractor {meta.get('extractor_version')!r}, "
            f"this build is {EXTRACTOR_VERSION!r}")
    db = CodeDatabase(meta=meta)
    for entry in doc["functions"]:
        db.insert(_record_from_json(entry))
    return db


# ----------------------------------------------------------------------
# top-k search
# ----------------------------------------------------------------------

class _WorstFirst:
    """Wraps a record id so the heap's smallest element is the worst entry
    (lowest score; among equal scores, the largest id)."""

    __slots__ = ("id",)

    def __init__(self, record_id: str):
        self.id = record_id

    def __lt__(self, other: "_WorstFirst") -> bool:
        return self.id > other.id

    def __eq__(self, other) -> bool:
        return self.id == other.id


def _scan(query: Sequence[PreparedSlot], items: Sequence[tuple[str, Sequence[PreparedSlot]]],
          weights: Sequence[float], active: Sequence[int], total_weight: float,
          k: int) -> list[tuple[float, str]]:
    """Priority-queue scan of one shard; returns (score, id), best first."""
    heap: list[tuple[float, _WorstFirst]] = []
    memos: list[dict] = [{} for _ in active]
    query_slots = [query[i] for i in active]
    class_weights = [weights[i] for i in active]
    for record_id, prepared in items:
        acc = 0.0
        for slot_idx, class_idx in enumerate(active):
            slot = prepared[class_idx]
            memo = memos[slot_idx]
            sim = memo.get(slot.key)
            if sim is None:
                sim = prepared_similarity(query_slots[slot_idx], slot)
                memo[slot.key] = sim
            acc += sim * class_weights[slot_idx]
        item = (acc / total_weight, _WorstFirst(record_id))
        if len(heap) < k:
            heapq.heappush(heap, item)
        elif item > heap[0]:
            heapq.heapreplace(heap, item)
    ordered = sorted(heap, key=lambda it: (-it[0], it[1].id))
    return [(score, wrapped.id) for score, wrapped in ordered]


def _shard_ranges(count: int, shards: int) -> list[tuple[int, int]]:
    shards = max(1, min(shards, count)) if count else 1
    base, extra = divmod(count, shards)
    ranges = []
    start = 0
    for i in range(shards):
        size = base + (1 if i < extra else 0)
        ranges.append((start, start + size))
        start += size
    return ranges


def top_k(db: CodeDatabase, query: FeatureVector, weights, k: int,
          shards: int = 1, candidate_ids: Iterable[str] | None = None,
          processes: int = 1) -> RankedList:
    """The k records most similar to `query` under Eq.-style weighting.

    Linear scan semantics: every candidate is compared. Ties break by
    ascending id; results are score-descending. An empty database yields an
    empty list. `processes > 1` scans shards in parallel worker processes
    (fork start method; falls back to sequential when unavailable).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    w = tuple(weights)
    if len(w) != N_CLASSES:
        raise ValueError(f"expected {N_CLASSES} weights")
    total_weight = sum(w)
    if total_weight <= 0.0:
        raise ZeroWeightSumError("all feature-class weights are zero")
    active = [i for i, wi in enumerate(w) if wi > 0.0]

    if candidate_ids is None:
        items = [(rid, db.prepared(rid)) for rid in db.ids()]
    else:
        items = [(rid, db.prepared(rid)) for rid in candidate_ids]
    if not items:
        return RankedList(entries=[], k_requested=k)

    query_prepared = prepare_vector(query)
    ranges = _shard_ranges(len(items), shards)
    if processes > 1 and len(ranges) > 1:
        partials = _scan_parallel(query_prepared, items, w, active, total_weight, k,
                                  ranges, processes)
    else:
        partials = [_scan(query_prepared, items[lo:hi], w, active, total_weight, k)
                    for lo, hi in ranges]

    merged = heapq.merge(*partials, key=lambda it: (-it[0], it[1]))
    best = [next(merged) for _ in range(min(k, len(items)))]
    entries = []
    for score, record_id in best:
        sims = tuple(prepared_similarity(qs, rs)
                     for qs, rs in zip(query_prepared, db.prepared(record_id)))
        entries.append(RankedEntry(record_id, score, sims))
    return RankedList(entries=entries, k_requested=k)


# Worker state is inherited through fork(); see top_k(processes=...).
_FORK_STATE: dict = {}


def _scan_range(bounds: tuple[int, int]) -> list[tuple[float, str]]:
    state = _FORK_STATE
    lo, hi = bounds
    return _scan(state["query"], state["items"][lo:hi], state["weights"],
                 state["active"], state["total_weight"], state["k"])


def _scan_parallel(query, items, weights, active, total_weight, k, ranges, processes):
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        return [_scan(query, items[lo:hi], weights, active, total_weight, k)
                for lo, hi in ranges]
    _FORK_STATE.update(query=query, items=items, weights=weights, active=active,
                       total_weight=total_weight, k=k)
    try:
        with ctx.Pool(processes=min(processes, len(ranges))) as pool:
            return pool.map(_scan_range, ranges)
    finally:
        _FORK_STATE.clear()
