from __future__ import annotations

import math
import random

import pytest

from codesim.features import (
    CorpusIndex, FeatureVector, IdfTable, LabeledTree, compute_idf,
    decode_subgraph, encode_subgraph, extract_cfg_subgraphs,
    extract_feature_vector, extract_local_types, extract_numeric_literals,
    extract_skeleton_tree, extract_string_literals, extract_type_operation_coupling,
    extract_type_signature, extract_weighted_nl_terms, extract_library_calls,
    extract_comment_words, merge_idf, nl_sources,
)
from codesim.frontend import Cfg, CfgNode, SourceUnit, parse_unit
from codesim.textproc import NlPipeline

from conftest import BINSEARCH_SRC
from oracles import strip_operator_leaves


def parse_one(text, path="t/unit.c", project="proj"):
    functions = parse_unit(SourceUnit(path, text, project))
    assert len(functions) == 1
    return functions[0]


def empty_index():
    return CorpusIndex(defined_functions={}, modeled_names=CorpusIndex.load_modeled_names())


# Expected observations for the binary-search fixture.
BINSEARCH_COUPLING = {
    ("int", "unary-"), ("int", "/"), ("int*", "+"), ("int", ">"),
    ("int", "+"), ("int", "<="), ("int", "-"), ("int", "<"),
}


def seq(*children):
    return LabeledTree("Seq", tuple(children))


def leaf(label):
    return LabeledTree(label)


BINSEARCH_SKELETON = seq(
    LabeledTree("Loop", (seq(
        LabeledTree("Cond", (seq(
            LabeledTree("Cond"),
        ),)),
    ),)),
)

BINSEARCH_DECORATED = seq(
    leaf("-"),
    LabeledTree("Loop", (seq(
        leaf("<="), leaf("/"), leaf("+"),
        LabeledTree("Cond", (seq(
            leaf("<"), leaf("-"),
            LabeledTree("Cond", (seq(leaf(">"), leaf("+")),)),
        ),)),
    ),)),
    leaf("negate"),
)


class TestBinsearchObservations:
    def test_type_operation_coupling(self, binsearch_ir):
        assert extract_type_operation_coupling(binsearch_ir) == BINSEARCH_COUPLING

    def test_skeleton_tree(self, binsearch_ir):
        assert extract_skeleton_tree(binsearch_ir) == BINSEARCH_SKELETON

    def test_decorated_skeleton_tree(self, binsearch_ir):
        assert extract_skeleton_tree(binsearch_ir, decorated=True) == BINSEARCH_DECORATED

    def test_numeric_literals(self, binsearch_ir):
        assert extract_numeric_literals(binsearch_ir) == {"-1", "0", "1", "2"}

    def test_local_types(self, binsearch_ir):
        assert extract_local_types(binsearch_ir) == {"int"}

    def test_type_signature(self, binsearch_ir):
        assert extract_type_signature(binsearch_ir) == {"int": 3, "int*": 1}

    def test_comment_words(self, binsearch_ir):
        assert extract_comment_words(binsearch_ir) == {"found", "match", "no"}

    def test_nl_term_keys(self, binsearch_ir):
        idf = IdfTable("fixture", doc_count=1, df={})
        terms = extract_weighted_nl_terms(binsearch_ir, idf)
        assert set(terms) == {"bin", "search", "low", "high", "mid", "match", "found"}


class TestSkeletonProperties:
    def test_straight_line_yields_empty(self):
        ir = parse_one("int f(void){return 0;}")
        assert extract_skeleton_tree(ir) is None
        assert extract_skeleton_tree(ir, decorated=True) is None

    def test_assignment_and_address_of_excluded(self):
        ir = parse_one("void f(int x){ int *p; p = &x; x += 2; }")
        assert extract_skeleton_tree(ir, decorated=True) is None

    def test_ternary_counts_as_conditional(self):
        ir = parse_one("int f(int a, int b){ return a > b ? a : b; }")
        assert extract_skeleton_tree(ir) == seq(LabeledTree("Cond"))
        assert extract_skeleton_tree(ir, decorated=True) == seq(
            LabeledTree("Cond", (seq(leaf(">")),)))

    def test_undecorated_is_decorated_minus_operators(self, binsearch_ir):
        decorated = extract_skeleton_tree(binsearch_ir, decorated=True)
        undecorated = extract_skeleton_tree(binsearch_ir)
        assert strip_operator_leaves(decorated) == undecorated

    def test_strip_property_on_planted_corpus(self, planted_corpus):
        db, _, _ = planted_corpus
        for record in db:
            dec = record.feature_vector["decorated-skeleton-tree"].value
            undec = record.feature_vector["skeleton-tree"].value
            assert strip_operator_leaves(dec) == undec


class TestCoupling:
    def test_plain_assignment_excluded(self):
        ir = parse_one("void f(int x, int y){ x = y; }")
        assert extract_type_operation_coupling(ir) == set()

    def test_struct_field_pair(self):
        ir = parse_unit(SourceUnit("t/s.c",
            "struct Bar { int foo; };\n"
            "void f(void){ struct Bar b; b.foo = 1; }\n", "p"))[0]
        assert extract_type_operation_coupling(ir) == {("struct Bar", ".foo")}


class TestIdf:
    def test_single_function(self):
        ir = parse_one("int search_things(void){return 0;}", project="p1")
        tables = compute_idf([ir])
        assert tables["p1"].doc_count == 1
        assert tables["p1"].df["search"] == 1

    def test_df_counts_functions_not_occurrences(self):
        sources = ["int f%d(void){ int mid; mid = %d; return mid; }" % (i, i)
                   for i in range(2)]
        sources += ["int g%d(void){ return %d; }" % (i, i) for i in range(8)]
        irs = [parse_one(t, path=f"t/{i}.c", project="p") for i, t in enumerate(sources)]
        tables = compute_idf(irs)
        assert tables["p"].doc_count == 10
        assert tables["p"].df["mid"] == 2

    def test_most_common_term_has_minimal_idf(self):
        irs = [parse_one(f"int walk{i}(void){{ int gamma = {i}; return gamma; }}",
                         path=f"t/{i}.c", project="p") for i in range(4)]
        tables = compute_idf(irs)
        table = tables["p"]
        idf = {t: math.log(1 + table.doc_count / df) for t, df in table.df.items()}
        assert idf["gamma"] == min(idf.values())

    def test_merge_idf(self):
        a = IdfTable("a", 3, {"x": 2})
        b = IdfTable("b", 5, {"x": 1, "y": 4})
        merged = merge_idf([a, b])
        assert merged.doc_count == 8
        assert merged.df == {"x": 3, "y": 4}


class TestWeightedNlTerms:
    def test_formula_value(self):
        # tf=2 for 'gamma' (local + comment), df=5 over 10 docs
        ir = parse_one("/* gamma */\nint zq(void){ int gamma = 1; return gamma; }")
        idf = IdfTable("proj", doc_count=10, df={"gamma": 5})
        terms = extract_weighted_nl_terms(ir, idf)
        assert terms["gamma"] == pytest.approx(2 * math.log(3), abs=1e-12)

    def test_name_boost_is_exactly_5x(self):
        # same tf and df for a name term and a local term
        ir = parse_one("int delta(void){ int sigma = 1; return sigma; }")
        idf = IdfTable("proj", doc_count=4, df={"delta": 2, "sigma": 2})
        terms = extract_weighted_nl_terms(ir, idf)
        assert terms["delta"] == 5.0 * terms["sigma"]

    def test_no_identifiers_no_terms(self):
        pipeline = NlPipeline(stop_words=frozenset({"f"}))
        ir = parse_one("int f(void){return 0;}")
        assert extract_weighted_nl_terms(ir, IdfTable("p", 1, {}), pipeline) == {}

    def test_unknown_terms_df_one(self):
        ir = parse_one("int omega(void){return 0;}")
        idf = IdfTable("proj", doc_count=7, df={})
        terms = extract_weighted_nl_terms(ir, idf)
        assert terms["omega"] == pytest.approx(5 * math.log(8), abs=1e-12)


class TestSubgraphEncoding:
    def test_fig4_style_fanout(self):
        # A->B, B->C, B->D in traversal order A,B,C,D
        matrix = [
            [0, 1, 0, 0],
            [0, 0, 1, 1],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
        ]
        assert encode_subgraph(matrix) == 17152

    def test_zero_matrix(self):
        assert encode_subgraph([[0] * 4 for _ in range(4)]) == 0

    def test_three_chain(self):
        matrix = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
        assert encode_subgraph(matrix) == 136

    def test_decode_inverts_encode_all_3x3(self):
        for code in range(1 << 9):
            assert encode_subgraph(decode_subgraph(code, 3)) == code

    def test_decode_inverts_encode_random_4x4(self):
        rng = random.Random(7)
        for _ in range(500):
            matrix = [[rng.randint(0, 1) for _ in range(4)] for _ in range(4)]
            assert decode_subgraph(encode_subgraph(matrix), 4) == matrix


def chain_cfg(n):
    nodes = [CfgNode("stmt", f"s{i}") for i in range(n)]
    edges = [[i + 1] if i + 1 < n else [] for i in range(n)]
    return Cfg(nodes=nodes, edges=edges, entry=0)


class TestSubgraphExtraction:
    def test_too_small_cfg(self):
        assert extract_cfg_subgraphs(chain_cfg(2), 3, "bfs") == {}

    def test_four_chain_k3(self):
        assert extract_cfg_subgraphs(chain_cfg(4), 3, "bfs") == {136: 2}
        assert extract_cfg_subgraphs(chain_cfg(4), 3, "dfs") == {136: 2}

    def test_count_bounded_by_nodes(self, binsearch_ir):
        for k in (3, 4):
            for strategy in ("bfs", "dfs"):
                shapes = extract_cfg_subgraphs(binsearch_ir.cfg, k, strategy)
                assert sum(shapes.values()) <= len(binsearch_ir.cfg.nodes)

    def test_binsearch_11_members(self, binsearch_ir):
        shapes = extract_cfg_subgraphs(binsearch_ir.cfg, 4, "bfs")
        assert sum(shapes.values()) == 11


class TestLibraryCalls:
    def test_modeled_calls(self):
        ir = parse_one('void f(char *d, char *s){ strcpy(d, s); strncpy(d, s, 4); }')
        modeled = extract_library_calls(ir, empty_index(), "modeled")
        assert modeled == {("strcpy", "string.h"), ("strncpy", "string.h")}

    def test_leaf_function_empty_everywhere(self):
        ir = parse_one("int f(int x){ return x + 1; }")
        index = empty_index()
        for category in ("modeled", "unmodeled", "user-defined"):
            assert extract_library_calls(ir, index, category) == set()

    def test_user_defined_cross_directory(self):
        caller = parse_one("int f(int x){ return helper(x); }", path="a/main.c")
        index = CorpusIndex(defined_functions={"helper": "b", "f": "a"},
                            modeled_names={})
        assert extract_library_calls(caller, index, "user-defined") == {("helper", "b")}
        assert extract_library_calls(caller, index, "unmodeled") == set()

    def test_same_directory_call_is_not_a_library(self):
        caller = parse_one("int f(int x){ return helper(x); }", path="a/main.c")
        index = CorpusIndex(defined_functions={"helper": "a"}, modeled_names={})
        for category in ("modeled", "unmodeled", "user-defined"):
            assert extract_library_calls(caller, index, category) == set()

    def test_unmodeled(self):
        ir = parse_one("int f(int x){ return frobnicate(x); }")
        assert extract_library_calls(ir, empty_index(), "unmodeled") == {("frobnicate", "")}


class TestSignaturesAndTokens:
    def test_void_signature(self):
        assert extract_type_signature(parse_one("void f(void){}")) == {"void": 1}

    def test_two_int_params(self):
        ir = parse_one("int g(int a, int b){ return a + b; }")
        assert extract_type_signature(ir) == {"int": 3}

    def test_string_literals_unescaped(self):
        ir = parse_one('void f(void){ puts("a\\n"); puts("b"); }')
        assert extract_string_literals(ir) == {"a\n", "b"}

    def test_hex_and_decimal_collide(self):
        ir = parse_one("int f(void){ return 0x10 + 16; }")
        assert extract_numeric_literals(ir) == {"16"}

    def test_char_literals_are_numeric(self):
        ir = parse_one("int f(char c){ return c == 'A'; }")
        assert extract_numeric_literals(ir) == {"65"}


class TestVectorAssembly:
    def test_minimal_function_vector(self):
        ir = parse_one("int f(void){return 0;}")
        vec = extract_feature_vector(ir, IdfTable("proj", 1, {}), empty_index())
        assert vec["numeric-literals"].value == frozenset({"0"})
        assert vec["type-signature"].value == {"int": 1}
        assert vec["skeleton-tree"].value is None
        assert vec["decorated-skeleton-tree"].value is None
        for cid in ("3-graph-cfg-bfs", "4-graph-cfg-bfs", "3-graph-cfg-dfs",
                    "4-graph-cfg-dfs"):
            assert vec[cid].value == {}

    def test_identical_functions_identical_vectors(self):
        text = "int same(int x){ return x * 3; }"
        a = parse_one(text, path="p/a.c", project="p")
        b = parse_one(text, path="p/b.c", project="p")
        idf = compute_idf([a, b])["p"]
        index = empty_index()
        va = extract_feature_vector(a, idf, index)
        vb = extract_feature_vector(b, idf, index)
        assert va == vb
        assert a.id != b.id

    def test_extraction_is_deterministic(self, binsearch_ir):
        idf = IdfTable("fixture", 3, {"search": 1})
        index = empty_index()
        first = extract_feature_vector(binsearch_ir, idf, index)
        second = extract_feature_vector(binsearch_ir, idf, index)
        assert first == second
