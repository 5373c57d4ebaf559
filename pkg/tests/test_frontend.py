from __future__ import annotations

import pytest

from codesim.errors import ParseError
from codesim.features import extract_cfg_subgraphs, extract_numeric_literals
from codesim.frontend import SourceUnit, build_cfg, parse_unit

from conftest import BINSEARCH_SRC


def parse_one(text, path="t/unit.c", project="proj"):
    functions = parse_unit(SourceUnit(path, text, project))
    assert len(functions) == 1
    return functions[0]


class TestParseUnit:
    def test_minimal_function(self):
        ir = parse_one("int f(void){return 0;}")
        assert ir.name == "f"
        assert ir.params == []
        assert ir.return_type == "int"
        assert ir.locals == set()
        assert extract_numeric_literals(ir) == {"0"}

    def test_empty_text_yields_nothing(self):
        assert parse_unit(SourceUnit("t/e.c", "", "p")) == []

    def test_declarations_only_yields_nothing(self):
        text = "int global_counter;\nstruct Pair { int a; int b; };\n"
        assert parse_unit(SourceUnit("t/d.c", text, "p")) == []

    def test_binsearch_fixture(self, binsearch_ir):
        assert binsearch_ir.name == "binSearch"
        assert binsearch_ir.params == [("a", "int*"), ("n", "int"), ("match", "int")]
        assert binsearch_ir.return_type == "int"
        assert binsearch_ir.locals == {("low", "int"), ("high", "int"), ("mid", "int")}
        assert [c.strip() for c in binsearch_ir.comments] == ["found match", "no match"]

    def test_syntax_error_has_location(self):
        with pytest.raises(ParseError) as err:
            parse_unit(SourceUnit("bad.c", "int f() {\n  return $;\n}\n", "p"))
        assert err.value.path == "bad.c"
        assert err.value.line == 2

    def test_outside_subset(self):
        for text in (
            "typedef int myint;",
            "int f(int x) { goto done; done: return x; }",
        ):
            with pytest.raises(ParseError):
                parse_unit(SourceUnit("bad.c", text, "p"))

    def test_parse_is_deterministic(self):
        unit = SourceUnit("fix/binsearch.c", BINSEARCH_SRC, "fixture")
        a = parse_unit(unit)[0]
        b = parse_unit(unit)[0]
        assert a.ast == b.ast
        assert a.cfg == b.cfg
        assert a.id == b.id

    def test_leaf_text_within_span(self, binsearch_ir):
        lo, hi = binsearch_ir.source_span
        span_text = BINSEARCH_SRC[lo:hi]
        for node in binsearch_ir.ast.walk():
            if node.kind in ("identifier", "numeric-literal", "string-literal") \
                    and not node.children:
                assert node.label in span_text

    def test_calls_recorded(self):
        ir = parse_one("int f(int x){ return helper(x) + strlen(\"s\"); }")
        assert [c.name for c in ir.calls] == ["helper", "strlen"]
        call_nodes = [n for n in ir.ast.walk() if n.kind == "call"]
        assert {n.label for n in call_nodes} == {c.name for c in ir.calls}

    def test_struct_field_access_typed(self):
        text = (
            "struct Bar { int foo; };\n"
            "int f(struct Bar b){ b.foo = 1; return b.foo; }\n"
        )
        ir = parse_unit(SourceUnit("t/s.c", text, "p"))[0]
        accesses = [n for n in ir.ast.walk() if n.kind == "field-access"]
        assert accesses and all(n.label == ".foo" for n in accesses)
        assert all(n.type_of == "int" for n in accesses)
        assert accesses[0].children[0].type_of == "struct Bar"

    def test_two_functions_two_irs(self):
        text = "int one(void){return 1;}\nint two(void){return 2;}\n"
        names = [ir.name for ir in parse_unit(SourceUnit("t/two.c", text, "p"))]
        assert names == ["one", "two"]


class TestCommentAssociation:
    def test_leading_comment_attaches_forward(self):
        text = "/* heads up */\nint f(void){return 0;}\n"
        ir = parse_one(text)
        assert ir.comments == [" heads up "]

    def test_inner_comment_attaches_to_enclosing(self):
        text = "int f(void){\n  // inner note\n  return 0;\n}\n"
        ir = parse_one(text)
        assert ir.comments == [" inner note"]

    def test_between_functions_attaches_to_next(self):
        text = (
            "int f(void){return 0;}\n"
            "/* belongs to g */\n"
            "int g(void){return 1;}\n"
        )
        functions = parse_unit(SourceUnit("t/u.c", text, "p"))
        assert functions[0].comments == []
        assert functions[1].comments == [" belongs to g "]

    def test_trailing_comment_dropped(self):
        text = "int f(void){return 0;}\n/* orphan */\n"
        ir = parse_one(text)
        assert ir.comments == []


class TestCfg:
    def test_straight_line_is_a_chain(self):
        ir = parse_one("void f(int x){ x = 1; x = 2; x = 3; }")
        cfg = ir.cfg
        assert all(len(succ) <= 1 for succ in cfg.edges)
        # entry, three statements, exit
        assert len(cfg.nodes) == 5

    def test_if_else_diamond(self):
        ir = parse_one("int f(int c){ int x; if (c) x = 1; else x = 2; return x; }")
        cfg = ir.cfg
        branch = [i for i, succ in enumerate(cfg.edges) if len(succ) == 2]
        assert len(branch) == 1
        then_succ, else_succ = cfg.edges[branch[0]]
        assert cfg.edges[then_succ] == cfg.edges[else_succ]  # both join at one node
        assert len(cfg.edges[then_succ]) == 1

    def test_while_produces_back_edge(self):
        ir = parse_one("void f(int n){ while (n) { n = n - 1; } }")
        cfg = ir.cfg
        cond = next(i for i, node in enumerate(cfg.nodes) if node.kind == "cond")
        body = cfg.edges[cond][0]
        assert cond in cfg.edges[body]  # back-edge

    def test_successor_order_then_first(self):
        ir = parse_one("int f(int c){ if (c) return 1; else return 2; }")
        cfg = ir.cfg
        cond = next(i for i, node in enumerate(cfg.nodes) if node.kind == "cond")
        then_idx, else_idx = cfg.edges[cond]
        assert then_idx < else_idx  # then branch was built (and numbered) first

    def test_switch_cases_in_source_order(self):
        ir = parse_one(
            "int f(int k){ switch (k) { case 1: return 1; case 2: return 2; "
            "default: return 0; } }")
        cfg = ir.cfg
        cond = next(i for i, node in enumerate(cfg.nodes) if node.kind == "cond")
        assert len(cfg.edges[cond]) == 3
        assert cfg.edges[cond] == sorted(cfg.edges[cond])

    def test_unreachable_code_pruned(self):
        ir = parse_one("int f(void){ return 1; int x; x = 2; return x; }")
        labels = [node.label for node in ir.cfg.nodes]
        assert labels.count("return") == 1

    def test_build_cfg_requires_function_root(self, binsearch_ir):
        with pytest.raises(ValueError):
            build_cfg(binsearch_ir.ast.children[0])

    def test_rebuild_is_identical(self, binsearch_ir):
        again = build_cfg(binsearch_ir.ast)
        assert again.edges == binsearch_ir.cfg.edges
        assert [n.kind for n in again.nodes] == [n.kind for n in binsearch_ir.cfg.nodes]

    def test_binsearch_4bfs_multiset_has_11_members(self, binsearch_ir):
        shapes = extract_cfg_subgraphs(binsearch_ir.cfg, 4, "bfs")
        assert sum(shapes.values()) == 11

    def test_for_loop_back_edge_and_continue(self):
        ir = parse_one(
            "int f(int n){ int s = 0; for (int i = 0; i < n; i++) { "
            "if (i == 2) continue; s += i; } return s; }")
        cfg = ir.cfg
        kinds = [node.label for node in cfg.nodes]
        assert "for.inc" in kinds
        inc = kinds.index("for.inc")
        cond = next(i for i, node in enumerate(cfg.nodes)
                    if node.kind == "cond" and node.label == "for")
        assert cond in cfg.edges[inc]

    def test_do_while_condition_last(self):
        ir = parse_one("int f(int n){ do { n--; } while (n > 0); return n; }")
        cfg = ir.cfg
        cond = next(i for i, node in enumerate(cfg.nodes)
                    if node.kind == "cond" and node.label == "do-while")
        body_stmt = next(i for i, node in enumerate(cfg.nodes)
                         if node.kind == "stmt" and node.label == "unary-op")
        assert body_stmt in cfg.edges[cond]  # loop back into the body
