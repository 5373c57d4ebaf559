"""The sixteen feature-classes: FunctionIR + corpus context -> FeatureVector."""

from __future__ import annotations

import json
import math
import posixpath
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable, Mapping

from .frontend.ir import COND_KINDS, LOOP_KINDS, Cfg, FunctionIR
from .frontend.typesys import common_type, decay, deref, is_pointer
from .textproc import NlPipeline, comment_words

# Slot order is fixed; it defines FeatureVector and WeightProfile positions.
FEATURE_CLASSES = (
    "type-op-coupling",
    "skeleton-tree",
    "decorated-skeleton-tree",
    "weighted-nl-terms",
    "3-graph-cfg-bfs",
    "4-graph-cfg-bfs",
    "3-graph-cfg-dfs",
    "4-graph-cfg-dfs",
    "modeled-lib-calls",
    "unmodeled-lib-calls",
    "user-lib-calls",
    "type-signature",
    "local-types",
    "numeric-literals",
    "string-literals",
    "comments",
)

N_CLASSES = len(FEATURE_CLASSES)
CLASS_INDEX = {cid: i for i, cid in enumerate(FEATURE_CLASSES)}

TERM_SET = "term-set"
PAIR_SET = "pair-set"
SHAPE_MULTISET = "shape-multiset"
TYPE_MULTISET = "type-multiset"
TREE = "tree"
WEIGHTED_TERMS = "weighted-terms"

CLASS_KINDS = {
    "type-op-coupling": PAIR_SET,
    "skeleton-tree": TREE,
    "decorated-skeleton-tree": TREE,
    "weighted-nl-terms": WEIGHTED_TERMS,
    "3-graph-cfg-bfs": SHAPE_MULTISET,
    "4-graph-cfg-bfs": SHAPE_MULTISET,
    "3-graph-cfg-dfs": SHAPE_MULTISET,
    "4-graph-cfg-dfs": SHAPE_MULTISET,
    "modeled-lib-calls": PAIR_SET,
    "unmodeled-lib-calls": PAIR_SET,
    "user-lib-calls": PAIR_SET,
    "type-signature": TYPE_MULTISET,
    "local-types": TERM_SET,
    "numeric-literals": TERM_SET,
    "string-literals": TERM_SET,
    "comments": TERM_SET,
}


@dataclass
class Observation:
    """One feature-observation; `value` matches the declared kind:

    term-set/pair-set -> frozenset, multisets -> dict (element -> count >= 1),
    tree -> LabeledTree | None, weighted-terms -> dict (term -> score >= 0).
    """

    kind: str
    value: Any


@dataclass(frozen=True)
class LabeledTree:
    label: str
    children: tuple["LabeledTree", ...] = ()


def tree_size(tree: LabeledTree | None) -> int:
    if tree is None:
        return 0
    return 1 + sum(tree_size(c) for c in tree.children)


def tree_preorder(tree: LabeledTree | None) -> tuple[str, ...]:
    if tree is None:
        return ()
    out = [tree.label]
    for child in tree.children:
        out.extend(tree_preorder(child))
    return tuple(out)


def tree_postorder(tree: LabeledTree | None) -> tuple[str, ...]:
    if tree is None:
        return ()
    out: list[str] = []
    for child in tree.children:
        out.extend(tree_postorder(child))
    out.append(tree.label)
    return tuple(out)


@dataclass
class FeatureVector:
    slots: tuple[Observation, ...]

    def __post_init__(self):
        if len(self.slots) != N_CLASSES:
            raise ValueError(f"feature vector needs {N_CLASSES} slots")

    def __getitem__(self, class_id: str) -> Observation:
        return self.slots[CLASS_INDEX[class_id]]


@dataclass
class IdfTable:
    """Per-project document frequencies; each function is one document."""

    project_id: str
    doc_count: int = 0
    df: dict[str, int] = field(default_factory=dict)


@dataclass
class CorpusIndex:
    """Corpus-wide lookup context: where names are defined, what is modeled."""

    defined_functions: dict[str, str] = field(default_factory=dict)
    modeled_names: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def load_modeled_names() -> dict[str, str]:
        raw = resources.files("codesim").joinpath("data", "modeled_names.json").read_text("utf-8")
        return {entry["name"]: entry["header"] for entry in json.loads(raw)}

    @classmethod
    def build(cls, functions: Iterable[FunctionIR]) -> "CorpusIndex":
        defined: dict[str, str] = {}
        for ir in functions:
            directory = posixpath.dirname(ir.path)
            # deterministic choice when a name is defined in several places
            if ir.name not in defined or directory < defined[ir.name]:
                defined[ir.name] = directory
        return cls(defined_functions=defined, modeled_names=cls.load_modeled_names())


# ----------------------------------------------------------------------
# type-operation coupling
# ----------------------------------------------------------------------

_COUPLED_BINARY = {
    "+", "-", "*", "/", "%", "<<", ">>", "&", "|", "^",
    "<", ">", "<=", ">=", "==", "!=", "&&", "||",
}
_UNARY_SPELLING = {"-": "unary-", "+": "unary+", "*": "deref"}
_COUPLED_UNARY = {"-", "+", "!", "~", "*", "++", "--"}


def extract_type_operation_coupling(ir: FunctionIR) -> frozenset[tuple[str, str]]:
    """Set of (operand type, operation) pairs for the function's operations."""
    pairs: set[tuple[str, str]] = set()
    for node in ir.ast.walk():
        if node.kind == "binary-op" and node.label in _COUPLED_BINARY:
            operand = common_type(node.children[0].type_of, node.children[1].type_of)
            if operand is not None:
                pairs.add((operand, node.label))
        elif node.kind == "unary-op" and node.label in _COUPLED_UNARY:
            operand = node.children[0].type_of if node.children else None
            if operand is not None:
                pairs.add((operand, _UNARY_SPELLING.get(node.label, node.label)))
        elif node.kind == "subscript":
            base = node.children[0].type_of
            if base is not None and is_pointer(base):
                pairs.add((decay(base), "+"))
        elif node.kind == "field-access":
            receiver = node.children[0].type_of
            if receiver is not None and node.label.startswith("->"):
                receiver = deref(receiver)
            if receiver is not None and receiver.startswith(("struct ", "union ")):
                pairs.add((receiver, node.label))
    return frozenset(pairs)


# ----------------------------------------------------------------------
# skeleton trees
# ----------------------------------------------------------------------

def extract_skeleton_tree(ir: FunctionIR, decorated: bool = False) -> LabeledTree | None:
    """Loop/conditional structure of the AST; decorated mode keeps operators.

    A function with nothing to retain yields None (the empty tree).
    """
    children = _transduce_children(ir.ast, decorated)
    if not children:
        return None
    return LabeledTree("Seq", tuple(children))


def _transduce(node, decorated: bool) -> list[LabeledTree]:
    kind = node.kind
    if kind in LOOP_KINDS:
        return [LabeledTree("Loop", _wrap_seq(_transduce_children(node, decorated)))]
    if kind in COND_KINDS:
        return [LabeledTree("Cond", _wrap_seq(_transduce_children(node, decorated)))]
    if decorated and kind == "binary-op" and node.label in _COUPLED_BINARY:
        return [LabeledTree(node.label)] + _transduce_children(node, decorated)
    if decorated and kind == "unary-op" and node.label in _COUPLED_UNARY:
        spelling = "negate" if node.label == "-" else _UNARY_SPELLING.get(node.label, node.label)
        return [LabeledTree(spelling)] + _transduce_children(node, decorated)
    return _transduce_children(node, decorated)


def _transduce_children(node, decorated: bool) -> list[LabeledTree]:
    out: list[LabeledTree] = []
    for child in node.children:
        out.extend(_transduce(child, decorated))
    return out


def _wrap_seq(children: list[LabeledTree]) -> tuple[LabeledTree, ...]:
    # consecutive retained nodes live under one Seq; empty Seqs are dropped
    if not children:
        return ()
    return (LabeledTree("Seq", tuple(children)),)


# ----------------------------------------------------------------------
# CFG k-subgraph fingerprints
# ----------------------------------------------------------------------

def encode_subgraph(matrix: list[list[int]]) -> int:
    """Adjacency matrix (traversal order) -> k^2-bit integer, row-major,
    first row most significant."""
    value = 0
    for row in matrix:
        for cell in row:
            value = (value << 1) | (1 if cell else 0)
    return value


def decode_subgraph(code: int, k: int) -> list[list[int]]:
    bits = k * k
    if code < 0 or code >= 1 << bits:
        raise ValueError(f"{code} does not fit a {k}x{k} matrix")
    matrix = [[0] * k for _ in range(k)]
    for i in range(bits - 1, -1, -1):
        if code & (1 << (bits - 1 - i)):
            matrix[i // k][i % k] = 1
    return matrix


def _bfs_order(cfg: Cfg, start: int, k: int) -> list[int]:
    order = [start]
    seen = {start}
    head = 0
    while head < len(order) and len(order) < k:
        for succ in cfg.edges[order[head]]:
            if succ not in seen:
                seen.add(succ)
                order.append(succ)
                if len(order) == k:
                    break
        head += 1
    return order


def _dfs_order(cfg: Cfg, start: int, k: int) -> list[int]:
    order: list[int] = []
    seen: set[int] = set()

    def visit(node: int) -> bool:
        seen.add(node)
        order.append(node)
        if len(order) == k:
            return True
        for succ in cfg.edges[node]:
            if succ not in seen and visit(succ):
                return True
        return False

    visit(start)
    return order


def extract_cfg_subgraphs(cfg: Cfg, k: int, strategy: str) -> dict[int, int]:
    """Multiset (shape -> count) of induced k-node subgraphs, one traversal
    per start node; starts reaching fewer than k nodes are thrown away."""
    if k not in (3, 4):
        raise ValueError("subgraph size must be 3 or 4")
    if strategy not in ("bfs", "dfs"):
        raise ValueError("strategy must be 'bfs' or 'dfs'")
    walk = _bfs_order if strategy == "bfs" else _dfs_order
    succ_sets = [set(edges) for edges in cfg.edges]
    shapes: Counter = Counter()
    for start in range(len(cfg.nodes)):
        order = walk(cfg, start, k)
        if len(order) < k:
            continue
        matrix = [[1 if v in succ_sets[u] else 0 for v in order] for u in order]
        shapes[encode_subgraph(matrix)] += 1
    return dict(shapes)


# ----------------------------------------------------------------------
# library calls
# ----------------------------------------------------------------------

CALL_CATEGORIES = ("modeled", "unmodeled", "user-defined")


def extract_library_calls(ir: FunctionIR, index: CorpusIndex,
                          category: str) -> frozenset[tuple[str, str]]:
    if category not in CALL_CATEGORIES:
        raise ValueError(f"unknown call category {category!r}")
    caller_dir = posixpath.dirname(ir.path)
    out: set[tuple[str, str]] = set()
    for call in ir.calls:
        name = call.name
        if name in index.modeled_names:
            if category == "modeled":
                out.add((name, index.modeled_names[name]))
        elif name in index.defined_functions:
            directory = index.defined_functions[name]
            if category == "user-defined" and directory != caller_dir:
                out.add((name, directory))
        elif category == "unmodeled":
            out.add((name, ""))
    return frozenset(out)


def resolve_calls(ir: FunctionIR, index: CorpusIndex) -> None:
    """Fill in each call site's resolution status for display purposes."""
    caller_dir = posixpath.dirname(ir.path)
    for call in ir.calls:
        if call.name in index.modeled_names:
            call.status = "modeled"
            call.header = index.modeled_names[call.name]
        elif call.name in index.defined_functions:
            call.directory = index.defined_functions[call.name]
            call.status = "local" if call.directory == caller_dir else "user-defined"
        else:
            call.status = "unmodeled"


# ----------------------------------------------------------------------
# signatures, literals, comments
# ----------------------------------------------------------------------

def extract_type_signature(ir: FunctionIR) -> dict[str, int]:
    """Multiset of parameter types plus the return type."""
    counter = Counter(ptype for _, ptype in ir.params)
    counter[ir.return_type] += 1
    return dict(counter)


def extract_local_types(ir: FunctionIR) -> frozenset[str]:
    return frozenset(vtype for _, vtype in ir.locals)


def numeric_value(label: str) -> int | float:
    """Value of a numeric-literal spelling (int/float/char constant)."""
    if label.startswith("'"):
        return _char_value(label[1:-1])
    text = label
    while text and text[-1] in "uUlLfF":
        text = text[:-1]
    if text.lower().startswith("0x"):
        return int(text, 16)
    if any(c in text for c in ".eE"):
        return float(text)
    if len(text) > 1 and text.startswith("0"):
        return int(text, 8)
    return int(text)


_SIMPLE_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "0": "\0", "a": "\a", "b": "\b",
    "f": "\f", "v": "\v", "\\": "\\", "'": "'", '"': '"', "?": "?",
}


def _char_value(body: str) -> int:
    return ord(unescape(body)[0]) if body else 0


def unescape(body: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\" or i + 1 >= len(body):
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt == "x":
            j = i + 2
            while j < len(body) and body[j] in "0123456789abcdefABCDEF":
                j += 1
            out.append(chr(int(body[i + 2:j], 16)) if j > i + 2 else "x")
            i = j
        elif nxt in "01234567":
            j = i + 1
            while j < min(i + 4, len(body)) and body[j] in "01234567":
                j += 1
            out.append(chr(int(body[i + 1:j], 8)))
            i = j
        else:
            out.append(_SIMPLE_ESCAPES.get(nxt, nxt))
            i += 2
    return "".join(out)


def canonical_numeric(label: str, negate: bool = False) -> str:
    """Canonical decimal spelling: '0x10' -> '16', '1e3' -> '1000.0'."""
    value = numeric_value(label)
    if negate:
        value = -value
    return repr(value) if isinstance(value, float) else str(value)


def extract_numeric_literals(ir: FunctionIR) -> frozenset[str]:
    """All numeric constants, canonicalized; unary +/- folds into the value."""
    out: set[str] = set()

    def visit(node):
        if (node.kind == "unary-op" and node.label in ("-", "+") and node.children
                and node.children[0].kind == "numeric-literal"):
            out.add(canonical_numeric(node.children[0].label, negate=node.label == "-"))
            return
        if node.kind == "numeric-literal":
            out.add(canonical_numeric(node.label))
            return
        for child in node.children:
            visit(child)

    visit(ir.ast)
    return frozenset(out)


def extract_string_literals(ir: FunctionIR) -> frozenset[str]:
    return frozenset(unescape(node.label[1:-1])
                     for node in ir.ast.walk() if node.kind == "string-literal")


def extract_comment_words(ir: FunctionIR) -> frozenset[str]:
    return comment_words(ir.comments)


# ----------------------------------------------------------------------
# weighted NL terms
# ----------------------------------------------------------------------

NAME_BOOST = 5.0


def nl_sources(ir: FunctionIR) -> list[tuple[str, str]]:
    """Raw (text, origin) NL term sources of a function."""
    sources = [(ir.name, "name")]
    sources.extend((name, "param") for name, _ in ir.params if name)
    sources.extend((name, "local") for name, _ in sorted(ir.locals))
    sources.extend((text, "comment") for text in ir.comments)
    return sources


def compute_idf(functions: Iterable[FunctionIR],
                pipeline: NlPipeline | None = None) -> dict[str, IdfTable]:
    """One IdfTable per project; df counts functions containing a term."""
    pipeline = pipeline or NlPipeline()
    tables: dict[str, IdfTable] = {}
    for ir in functions:
        table = tables.setdefault(ir.project_id, IdfTable(ir.project_id))
        table.doc_count += 1
        for term in set(pipeline.process(nl_sources(ir))):
            table.df[term] = table.df.get(term, 0) + 1
    return tables


def merge_idf(tables: Iterable[IdfTable], project_id: str = "*") -> IdfTable:
    merged = IdfTable(project_id)
    for table in tables:
        merged.doc_count += table.doc_count
        for term, count in table.df.items():
            merged.df[term] = merged.df.get(term, 0) + count
    return merged


def extract_weighted_nl_terms(ir: FunctionIR, idf: IdfTable,
                              pipeline: NlPipeline | None = None) -> dict[str, float]:
    """score(t) = tf(t) * ln(1 + N/df(t)), with function-name terms boosted 5x.

    Terms unknown to the IDF table count as df = 1.
    """
    pipeline = pipeline or NlPipeline()
    counter, name_terms = pipeline.process_with_origins(nl_sources(ir))
    doc_count = max(idf.doc_count, 1)
    scores: dict[str, float] = {}
    for term, tf in counter.items():
        df = idf.df.get(term, 1)
        score = tf * math.log(1.0 + doc_count / df)
        if term in name_terms:
            score *= NAME_BOOST
        scores[term] = score
    return scores


# ----------------------------------------------------------------------
# assembly
# ----------------------------------------------------------------------

def extract_feature_vector(ir: FunctionIR, idf: IdfTable, index: CorpusIndex,
                           pipeline: NlPipeline | None = None) -> FeatureVector:
    """Populate all sixteen slots. Deterministic in (ir, idf, index)."""
    slots = (
        Observation(PAIR_SET, extract_type_operation_coupling(ir)),
        Observation(TREE, extract_skeleton_tree(ir, decorated=False)),
        Observation(TREE, extract_skeleton_tree(ir, decorated=True)),
        Observation(WEIGHTED_TERMS, extract_weighted_nl_terms(ir, idf, pipeline)),
        Observation(SHAPE_MULTISET, extract_cfg_subgraphs(ir.cfg, 3, "bfs")),
        Observation(SHAPE_MULTISET, extract_cfg_subgraphs(ir.cfg, 4, "bfs")),
        Observation(SHAPE_MULTISET, extract_cfg_subgraphs(ir.cfg, 3, "dfs")),
        Observation(SHAPE_MULTISET, extract_cfg_subgraphs(ir.cfg, 4, "dfs")),
        Observation(PAIR_SET, extract_library_calls(ir, index, "modeled")),
        Observation(PAIR_SET, extract_library_calls(ir, index, "unmodeled")),
        Observation(PAIR_SET, extract_library_calls(ir, index, "user-defined")),
        Observation(TYPE_MULTISET, extract_type_signature(ir)),
        Observation(TERM_SET, extract_local_types(ir)),
        Observation(TERM_SET, extract_numeric_literals(ir)),
        Observation(TERM_SET, extract_string_literals(ir)),
        Observation(TERM_SET, extract_comment_words(ir)),
    )
    return FeatureVector(slots)


def empty_observation(class_id: str) -> Observation:
    kind = CLASS_KINDS[class_id]
    if kind in (TERM_SET, PAIR_SET):
        return Observation(kind, frozenset())
    if kind in (SHAPE_MULTISET, TYPE_MULTISET):
        return Observation(kind, {})
    if kind == TREE:
        return Observation(kind, None)
    return Observation(kind, {})


def empty_feature_vector() -> FeatureVector:
    return FeatureVector(tuple(empty_observation(cid) for cid in FEATURE_CLASSES))
