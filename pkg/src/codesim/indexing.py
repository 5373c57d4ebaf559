"""Two-pass corpus indexing: manifest -> parsed units -> CodeDatabase.

Pass 1 parses every unit and accumulates per-project IDF tables plus the
corpus-wide name index; pass 2 extracts feature vectors. NL extraction must
not start before IDF tables are complete, which this module guarantees by
construction.
"""

from __future__ import annotations

import hashlib
import json
import os
import posixpath
from dataclasses import dataclass

from .errors import DatabaseFormatError
from .features import (
    CorpusIndex, compute_idf, extract_feature_vector, merge_idf, resolve_calls,
)
from .frontend import FunctionIR, SourceUnit, parse_unit
from .store import CodeDatabase, FunctionRecord
from .textproc import NlPipeline


@dataclass
class ManifestEntry:
    path: str  # relative to the manifest file; doubles as the record path
    project_id: str
    distractor: bool = False


def load_manifest(path: str) -> list[ManifestEntry]:
    """Manifest format: {"entries": [{"path", "project_id", "distractor"?}]}."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DatabaseFormatError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise DatabaseFormatError("manifest must contain an 'entries' list")
    entries = []
    for raw in doc["entries"]:
        try:
            entries.append(ManifestEntry(
                path=raw["path"],
                project_id=raw["project_id"],
                distractor=bool(raw.get("distractor", False)),
            ))
        except (KeyError, TypeError) as exc:
            raise DatabaseFormatError(f"bad manifest entry {raw!r}: {exc}") from exc
    return entries


def read_units(manifest_path: str, entries: list[ManifestEntry]) -> list[SourceUnit]:
    root = os.path.dirname(os.path.abspath(manifest_path))
    units = []
    for entry in entries:
        full = os.path.join(root, entry.path)
        with open(full, "r", encoding="utf-8") as handle:
            units.append(SourceUnit(entry.path, handle.read(), entry.project_id))
    return units


def build_database(manifest_path: str, include_source: bool = True,
                   pipeline: NlPipeline | None = None) -> CodeDatabase:
    """Index every unit listed in the manifest into a fresh database."""
    entries = load_manifest(manifest_path)
    units = read_units(manifest_path, entries)
    pipeline = pipeline or NlPipeline()

    parsed: list[tuple[FunctionIR, SourceUnit, ManifestEntry]] = []
    for unit, entry in zip(units, entries):
        for ir in parse_unit(unit):
            parsed.append((ir, unit, entry))

    index = CorpusIndex.build(ir for ir, _, _ in parsed)
    idf_tables = compute_idf((ir for ir, _, _ in parsed), pipeline)
    corpus_idf = merge_idf(idf_tables.values())

    with open(manifest_path, "rb") as handle:
        manifest_digest = hashlib.sha256(handle.read()).hexdigest()
    db = CodeDatabase(meta={
        "manifest_digest": manifest_digest,
        "corpus_idf": {"doc_count": corpus_idf.doc_count, "df": corpus_idf.df},
    })
    for ir, unit, entry in parsed:
        resolve_calls(ir, index)
        vector = extract_feature_vector(ir, idf_tables[ir.project_id], index, pipeline)
        lo, hi = ir.source_span
        db.insert(FunctionRecord(
            id=ir.id,
            name=ir.name,
            path=ir.path,
            line=ir.line,
            project_id=ir.project_id,
            feature_vector=vector,
            source_text=unit.text[lo:hi] if include_source else None,
            distractor=entry.distractor,
        ))
    return db


def extract_query_vector(path: str, text: str, db: CodeDatabase,
                         pipeline: NlPipeline | None = None):
    """Feature vector for an ad-hoc query function (exactly one definition).

    The query is scored against the database's corpus-wide IDF; unknown terms
    fall back to df = 1. Returns (FunctionIR, FeatureVector).
    """
    pipeline = pipeline or NlPipeline()
    functions = parse_unit(SourceUnit(path, text, "query"))
    if len(functions) != 1:
        raise ValueError(f"query file must contain exactly one function "
                         f"(found {len(functions)})")
    ir = functions[0]
    defined: dict[str, str] = {}
    for record in db:
        directory = posixpath.dirname(record.path)
        if record.name not in defined or directory < defined[record.name]:
            defined[record.name] = directory
    index = CorpusIndex(defined_functions=defined,
                        modeled_names=CorpusIndex.load_modeled_names())
    resolve_calls(ir, index)
    vector = extract_feature_vector(ir, db.corpus_idf(), index, pipeline)
    return ir, vector
