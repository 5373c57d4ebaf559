"""Synthetic corpus generation.

Distractor C functions for retrieval benchmarks (the real engine indexes
them like any other source), plus synthetic feature vectors for scale and
oracle tests that don't need the frontend.
"""

from __future__ import annotations

import json
import os
import random

from .features import (
    FEATURE_CLASSES, PAIR_SET, SHAPE_MULTISET, TERM_SET, TREE, TYPE_MULTISET,
    WEIGHTED_TERMS, CLASS_KINDS, FeatureVector, LabeledTree, Observation,
)
from .store import CodeDatabase, FunctionRecord

_NOUNS = [
    "data", "buffer", "item", "value", "count", "total", "index", "node",
    "list", "table", "entry", "queue", "block", "frame", "field", "token",
    "record", "slot", "chunk", "line", "page", "cell", "link", "score",
    "level", "flag", "mask", "code", "byte", "word", "grid", "pool",
]
_VERBS = [
    "update", "compute", "scan", "fill", "tally", "merge", "pack", "filter",
    "collect", "shift", "rotate", "clamp", "blend", "trim", "fold", "probe",
    "adjust", "reduce", "emit", "digest",
]
_COMMENT_WORDS = [
    "running", "partial", "window", "cursor", "sentinel", "wrap", "carry",
    "overflow", "bounds", "legacy", "padding", "stride", "batch", "damp",
]


def _name(rng: random.Random, idx: int) -> str:
    verb = rng.choice(_VERBS)
    noun = rng.choice(_NOUNS)
    if rng.random() < 0.5:
        return f"{verb}_{noun}_{idx}"
    return f"{verb}{noun.capitalize()}{idx}"


def _maybe_comment(rng: random.Random) -> str:
    if rng.random() < 0.4:
        words = rng.sample(_COMMENT_WORDS, rng.randint(1, 3))
        return f"/* {' '.join(words)} */\n"
    return ""


def distractor_source(rng: random.Random, idx: int) -> tuple[str, str]:
    """One synthetic function definition; returns (function name, source)."""
    template = rng.randrange(6)
    name = _name(rng, idx)
    lit = [rng.randint(0, 9), rng.randint(2, 64), rng.randint(100, 999)]
    if template == 0:
        op = rng.choice(["+", "^", "|"])
        body = (
            f"int {name}(int *xs, int n)\n"
            "{\n"
            f"    int acc = {lit[0]};\n"
            "    for (int i = 0; i < n; i++) {\n"
            f"        acc = acc {op} xs[i];\n"
            "    }\n"
            f"    return acc + {lit[1]};\n"
            "}\n")
    elif template == 1:
        cmp_op = rng.choice(["<", ">"])
        body = (
            f"int {name}(int *xs, int n)\n"
            "{\n"
            "    int best = xs[0];\n"
            "    int i = 1;\n"
            "    while (i < n) {\n"
            f"        if (xs[i] {cmp_op} best)\n"
            "            best = xs[i];\n"
            "        i++;\n"
            "    }\n"
            "    return best;\n"
            "}\n")
    elif template == 2:
        call = rng.choice(["strlen", "strchr", "strcmp"])
        arg = {"strlen": "s", "strchr": "s, 'x'", "strcmp": 's, "end"'}[call]
        body = (
            f"int {name}(char *s)\n"
            "{\n"
            f"    if (!{call}({arg}))\n"
            f"        return -{lit[0] + 1};\n"
            f"    return {lit[1]};\n"
            "}\n")
    elif template == 3:
        body = (
            f"int {name}(int kind, int amount)\n"
            "{\n"
            "    switch (kind) {\n"
            f"    case 0: return amount + {lit[0]};\n"
            f"    case 1: return amount * {lit[1]};\n"
            f"    case 2: return amount % {lit[1]};\n"
            "    default: break;\n"
            "    }\n"
            f"    return {lit[2]};\n"
            "}\n")
    elif template == 4:
        fn = rng.choice(["sqrt", "log", "exp"])
        body = (
            f"double {name}(double x, double y)\n"
            "{\n"
            f"    double scale = {fn}(x * x + y * y);\n"
            f"    if (scale > {lit[1]}.0)\n"
            f"        scale = scale / {lit[1]}.0;\n"
            "    return scale;\n"
            "}\n")
    else:
        body = (
            f"void {name}(int *dst, int *src, int n)\n"
            "{\n"
            "    int j;\n"
            f"    for (j = 0; j + {lit[0] + 1} < n; j += {lit[0] + 1}) {{\n"
            "        dst[j] = src[n - j - 1];\n"
            "    }\n"
            "}\n")
    return name, _maybe_comment(rng) + body


def write_distractor_corpus(root: str, count: int, seed: int,
                            files_per_dir: int = 50) -> list[dict]:
    """Write `count` synthetic functions under `root`; returns manifest
    entries (paths relative to `root`)."""
    rng = random.Random(seed)
    entries = []
    for i in range(count):
        bucket = i // files_per_dir
        rel_dir = f"dist{bucket:03d}"
        os.makedirs(os.path.join(root, rel_dir), exist_ok=True)
        _, source = distractor_source(rng, i)
        rel_path = f"{rel_dir}/f{i:05d}.c"
        with open(os.path.join(root, rel_path), "w", encoding="utf-8") as handle:
            handle.write(source)
        entries.append({"path": rel_path, "project_id": rel_dir, "distractor": True})
    return entries


def write_manifest(path: str, entries: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump({"entries": entries}, handle, indent=0)
        handle.write("\n")


# ----------------------------------------------------------------------
# synthetic feature vectors (no frontend involved)
# ----------------------------------------------------------------------

_TYPES = ["int", "int*", "char", "char*", "double", "unsigned int", "struct Box"]
_OPS = ["+", "-", "*", "/", "<", ">", "<=", "==", "%", "unary-"]
_TERMS = _NOUNS + _VERBS
_TREE_LABELS = ["Loop", "Cond"]
_TREE_LEAVES = ["+", "-", "<", "/", "negate", "=="]


def _random_tree(rng: random.Random, budget: int) -> LabeledTree | None:
    if budget <= 0:
        return None

    def grow(remaining: list[int]) -> LabeledTree:
        remaining[0] -= 1
        if remaining[0] <= 0 or rng.random() < 0.35:
            return LabeledTree(rng.choice(_TREE_LEAVES))
        label = rng.choice(_TREE_LABELS + ["Seq"])
        kids = tuple(grow(remaining) for _ in range(rng.randint(1, 3))
                     if remaining[0] > 0)
        return LabeledTree(label, kids)

    return grow([budget])


def random_observation(rng: random.Random, class_id: str) -> Observation:
    kind = CLASS_KINDS[class_id]
    if kind == TERM_SET:
        return Observation(kind, frozenset(
            rng.sample(_TERMS, rng.randint(0, 5))))
    if kind == PAIR_SET:
        pairs = {(rng.choice(_TYPES), rng.choice(_OPS))
                 for _ in range(rng.randint(0, 5))}
        return Observation(kind, frozenset(pairs))
    if kind == SHAPE_MULTISET:
        return Observation(kind, {rng.randrange(1 << 12): rng.randint(1, 4)
                                  for _ in range(rng.randint(0, 5))})
    if kind == TYPE_MULTISET:
        return Observation(kind, {t: rng.randint(1, 3)
                                  for t in rng.sample(_TYPES, rng.randint(0, 4))})
    if kind == TREE:
        return Observation(kind, _random_tree(rng, rng.randint(0, 8)))
    return Observation(kind, {t: round(rng.uniform(0.05, 3.0), 3)
                              for t in rng.sample(_TERMS, rng.randint(0, 5))})


def random_feature_vector(rng: random.Random) -> FeatureVector:
    return FeatureVector(tuple(random_observation(rng, cid)
                               for cid in FEATURE_CLASSES))


def pooled_feature_vector(rng: random.Random,
                          pools: list[list[Observation]]) -> FeatureVector:
    """Vector whose slots are drawn from shared per-class observation pools
    (keeps memory flat for very large synthetic databases)."""
    return FeatureVector(tuple(rng.choice(pool) for pool in pools))


def observation_pools(rng: random.Random, per_class: int) -> list[list[Observation]]:
    return [[random_observation(rng, cid) for _ in range(per_class)]
            for cid in FEATURE_CLASSES]


def synthetic_database(count: int, seed: int, pool_size: int = 0) -> CodeDatabase:
    """Database of synthetic vectors; `pool_size > 0` shares observations."""
    rng = random.Random(seed)
    pools = observation_pools(rng, pool_size) if pool_size else None
    db = CodeDatabase(meta={"synthetic": True})
    for i in range(count):
        vector = (pooled_feature_vector(rng, pools) if pools
                  else random_feature_vector(rng))
        db.insert(FunctionRecord(
            id=f"syn/{i:06d}.c:fn{i}:1",
            name=f"fn{i}",
            path=f"syn/{i:06d}.c",
            line=1,
            project_id="synthetic",
            feature_vector=vector,
        ))
    return db
