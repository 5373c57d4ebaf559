"""Recursive-descent parser for the C subset: source text -> FunctionIR.

Grammar and canonicalization rules are pinned in docs/c-subset.md. The parser
does lightweight type inference while building the AST so that extractors can
read operand types straight off the nodes.
"""

from __future__ import annotations

from ..errors import ParseError
from .cfg import build_cfg
from .ir import AstNode, CallSite, FunctionIR, SourceUnit, make_function_id
from .lexer import Lexer, Token
from .typesys import canonical_base, common_type, decay, deref, is_pointer

TYPE_START = {
    "void", "char", "short", "int", "long", "float", "double", "signed",
    "unsigned", "struct", "union", "enum", "const", "volatile", "static",
    "extern", "inline", "register",
}

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}

_BINARY_LEVELS = [
    ({"||"}, "logical"),
    ({"&&"}, "logical"),
    ({"|"}, "arith"),
    ({"^"}, "arith"),
    ({"&"}, "arith"),
    ({"==", "!="}, "compare"),
    ({"<", ">", "<=", ">="}, "compare"),
    ({"<<", ">>"}, "shift"),
    ({"+", "-"}, "arith"),
    ({"*", "/", "%"}, "arith"),
]


def parse_unit(unit: SourceUnit) -> list[FunctionIR]:
    """Parse one source file into FunctionIR records, one per definition.

    A unit with no function definitions yields an empty list. Syntax outside
    the subset raises ParseError.
    """
    return _Parser(unit).parse()


class _FunctionAcc:
    """Mutable state collected while a single function body is parsed."""

    def __init__(self, name: str, return_type: str, name_line: int, start: int):
        self.name = name
        self.return_type = return_type
        self.name_line = name_line
        self.start = start
        self.params: list[tuple[str, str]] = []
        self.locals: set[tuple[str, str]] = set()


class _Parser:
    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.lexer = Lexer(unit.text, unit.path)
        self.tokens, self.comments = self.lexer.tokenize()
        self.idx = 0
        self.scopes: list[dict[str, str]] = [{}]
        self.structs: dict[str, dict[str, str]] = {}
        self.func_returns: dict[str, str] = {}
        self.fn: _FunctionAcc | None = None
        self.loop_depth = 0
        self.switch_depth = 0

    # ------------------------------------------------------------------
    # token plumbing
    # ------------------------------------------------------------------

    def cur(self) -> Token:
        return self.tokens[self.idx]

    def peek(self, ahead: int = 1) -> Token:
        return self.tokens[min(self.idx + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.idx]
        if tok.kind != "eof":
            self.idx += 1
        return tok

    def at(self, text: str) -> bool:
        return self.cur().text == text and self.cur().kind in ("punct", "keyword")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(f"expected {text!r}, found {self.cur().text!r}")
        return self.advance()

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.cur()
        return ParseError(self.unit.path, tok.line, message)

    # ------------------------------------------------------------------
    # scopes
    # ------------------------------------------------------------------

    def push_scope(self):
        self.scopes.append({})

    def pop_scope(self):
        self.scopes.pop()

    def declare(self, name: str, type_str: str):
        self.scopes[-1][name] = type_str
        if self.fn is not None and len(self.scopes) > 2:
            # anything declared below the parameter scope is a local
            self.fn.locals.add((name, type_str))

    def lookup(self, name: str) -> str | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # ------------------------------------------------------------------
    # top level
    # ------------------------------------------------------------------

    def parse(self) -> list[FunctionIR]:
        functions: list[FunctionIR] = []
        while self.cur().kind != "eof":
            fn = self.parse_external()
            if fn is not None:
                functions.append(fn)
        self._attach_comments(functions)
        return functions

    def parse_external(self) -> FunctionIR | None:
        tok = self.cur()
        if tok.text in ("typedef", "goto"):
            raise self.fail(f"{tok.text!r} is outside the supported subset")
        if tok.text in ("struct", "union") and self.peek(2).text == "{":
            self.parse_struct_def()
            return None
        if tok.text == "enum" and (self.peek().text == "{" or self.peek(2).text == "{"):
            self.parse_enum_def()
            return None
        if tok.kind not in ("keyword", "ident") or (
            tok.kind == "keyword" and tok.text not in TYPE_START
        ):
            raise self.fail(f"expected a declaration, found {tok.text!r}")

        start_tok = self.cur()
        base = self.parse_type_spec()
        name_tok, type_str = self.parse_declarator_head(base)
        if self.at("("):
            return self.parse_function(start_tok, name_tok, type_str)
        # global variable declaration(s)
        self.finish_global_declarator(name_tok.text, type_str)
        while self.accept(","):
            name_tok, type_str = self.parse_declarator_head(base)
            self.finish_global_declarator(name_tok.text, type_str)
        self.expect(";")
        return None

    def parse_struct_def(self):
        keyword = self.advance().text
        name = self.expect_ident("struct tag").text
        self.expect("{")
        fields: dict[str, str] = {}
        while not self.at("}"):
            base = self.parse_type_spec()
            while True:
                fname_tok, ftype = self.parse_declarator_head(base)
                ftype = self.parse_array_suffix(ftype, [])
                fields[fname_tok.text] = ftype
                if not self.accept(","):
                    break
            self.expect(";")
        self.expect("}")
        self.structs[name] = fields
        tag_type = f"{keyword} {name}"
        # optional declarators after the body
        if not self.at(";"):
            while True:
                ptr = 0
                while self.accept("*"):
                    ptr += 1
                var = self.expect_ident("declarator").text
                self.scopes[0][var] = tag_type + "*" * ptr
                if not self.accept(","):
                    break
        self.expect(";")

    def parse_enum_def(self):
        self.advance()  # enum
        if self.cur().kind == "ident":
            self.advance()
        self.expect("{")
        value = 0
        while not self.at("}"):
            const = self.expect_ident("enumerator").text
            if self.accept("="):
                tok = self.advance()
                if tok.kind != "int":
                    raise self.fail("enumerator value must be an integer literal", tok)
                value = _int_value(tok.text)
            self.scopes[0][const] = "int"
            value += 1
            if not self.accept(","):
                break
        self.expect("}")
        self.expect(";")

    def expect_ident(self, what: str) -> Token:
        tok = self.cur()
        if tok.kind != "ident":
            raise self.fail(f"expected {what}, found {tok.text!r}")
        return self.advance()

    # ------------------------------------------------------------------
    # types and declarators
    # ------------------------------------------------------------------

    def at_type_start(self) -> bool:
        return self.cur().kind == "keyword" and self.cur().text in TYPE_START

    def parse_type_spec(self) -> str:
        """Parse base type keywords; returns the canonical base spelling."""
        words: list[str] = []
        tag = None
        while self.at_type_start():
            word = self.advance().text
            if word in ("struct", "union", "enum"):
                tag = f"{word} {self.expect_ident(f'{word} tag').text}"
            else:
                words.append(word)
        if tag is not None:
            return tag
        if not words:
            raise self.fail(f"expected a type, found {self.cur().text!r}")
        return canonical_base(words)

    def parse_pointers(self, base: str) -> str:
        while True:
            if self.at("*"):
                self.advance()
                base += "*"
            elif self.cur().text in ("const", "volatile"):
                self.advance()
            else:
                return base

    def parse_declarator_head(self, base: str) -> tuple[Token, str]:
        """'*'* name; array suffixes are handled by the callers that allow them."""
        type_str = self.parse_pointers(base)
        name_tok = self.expect_ident("declarator")
        return name_tok, type_str

    def parse_array_suffix(self, type_str: str, dim_nodes: list[AstNode]) -> str:
        while self.at("["):
            self.advance()
            if self.at("]"):
                spelling = ""
            else:
                expr = self.parse_assignment()
                dim_nodes.append(expr)
                if expr.kind == "numeric-literal":
                    spelling = str(_int_value(expr.label))
                elif expr.kind == "identifier":
                    spelling = expr.label
                else:
                    raise self.fail("array dimension must be a constant")
            self.expect("]")
            type_str += f"[{spelling}]"
        return type_str

    def finish_global_declarator(self, name: str, type_str: str):
        type_str = self.parse_array_suffix(type_str, [])
        self.scopes[0][name] = type_str
        if self.accept("="):
            self.parse_initializer()

    def parse_initializer(self) -> list[AstNode]:
        if self.accept("{"):
            elems: list[AstNode] = []
            while not self.at("}"):
                elems.extend(self.parse_initializer())
                if not self.accept(","):
                    break
            self.expect("}")
            return elems
        return [self.parse_assignment()]

    # ------------------------------------------------------------------
    # functions
    # ------------------------------------------------------------------

    def parse_function(self, start_tok: Token, name_tok: Token, return_type: str) -> FunctionIR | None:
        self.expect("(")
        fn = _FunctionAcc(name_tok.text, return_type, name_tok.line, start_tok.pos)
        self.func_returns[fn.name] = return_type
        params: list[tuple[str, str]] = []
        if self.at("void") and self.peek().text == ")":
            self.advance()
        elif not self.at(")"):
            while True:
                base = self.parse_type_spec()
                ptype = self.parse_pointers(base)
                pname = ""
                if self.cur().kind == "ident":
                    pname = self.advance().text
                if self.at("["):  # parameter arrays decay to pointers
                    self.advance()
                    if not self.at("]"):
                        tok = self.advance()
                        if tok.kind != "int" and tok.kind != "ident":
                            raise self.fail("array dimension must be a constant", tok)
                    self.expect("]")
                    if self.at("["):
                        raise self.fail("multi-dimensional array parameters are not supported")
                    ptype += "*"
                params.append((pname, ptype))
                if not self.accept(","):
                    break
        self.expect(")")
        if self.accept(";"):
            return None  # prototype
        fn.params = params
        self.fn = fn
        self.push_scope()
        for pname, ptype in params:
            if pname:
                self.scopes[-1][pname] = ptype
        body = self.parse_compound()
        self.pop_scope()
        self.fn = None
        end = self.tokens[self.idx - 1].pos + 1  # past the closing brace
        root = AstNode("function-def", fn.name, [body], return_type, start_tok.pos)
        calls = [CallSite(node.label) for node in root.walk() if node.kind == "call"]
        ir = FunctionIR(
            id=make_function_id(self.unit.path, fn.name, fn.name_line),
            name=fn.name,
            path=self.unit.path,
            project_id=self.unit.project_id,
            line=fn.name_line,
            params=params,
            return_type=return_type,
            locals=fn.locals,
            ast=root,
            cfg=build_cfg(root),
            comments=[],
            calls=calls,
            source_span=(start_tok.pos, end),
        )
        return ir

    def _attach_comments(self, functions: list[FunctionIR]):
        ordered = sorted(functions, key=lambda f: f.source_span[0])
        for comment in self.comments:
            target = None
            for fn in ordered:
                lo, hi = fn.source_span
                if lo <= comment.start < hi:
                    target = fn
                    break
                if fn.source_span[0] >= comment.end:
                    target = fn
                    break
            if target is not None:
                target.comments.append(comment.text)

    # ------------------------------------------------------------------
    # statements
    # ------------------------------------------------------------------

    def parse_compound(self) -> AstNode:
        open_tok = self.expect("{")
        self.push_scope()
        children: list[AstNode] = []
        while not self.at("}"):
            if self.cur().kind == "eof":
                raise self.fail("unexpected end of file inside a block", open_tok)
            children.extend(self.parse_statement())
        self.expect("}")
        self.pop_scope()
        return AstNode("seq", "", children, pos=open_tok.pos)

    def parse_statement(self) -> list[AstNode]:
        tok = self.cur()
        if tok.text == "{":
            return [self.parse_compound()]
        if self.at_type_start():
            return self.parse_declaration()
        if tok.text == ";":
            self.advance()
            return []
        if tok.text == "if":
            return [self.parse_if()]
        if tok.text == "while":
            return [self.parse_while()]
        if tok.text == "do":
            return [self.parse_do_while()]
        if tok.text == "for":
            return [self.parse_for()]
        if tok.text == "switch":
            return [self.parse_switch()]
        if tok.text == "return":
            self.advance()
            children = [] if self.at(";") else [self.parse_expr()]
            self.expect(";")
            return [AstNode("return", "return", children, pos=tok.pos)]
        if tok.text == "break":
            if self.loop_depth == 0 and self.switch_depth == 0:
                raise self.fail("'break' outside of loop or switch")
            self.advance()
            self.expect(";")
            return [AstNode("break", "break", pos=tok.pos)]
        if tok.text == "continue":
            if self.loop_depth == 0:
                raise self.fail("'continue' outside of loop")
            self.advance()
            self.expect(";")
            return [AstNode("continue", "continue", pos=tok.pos)]
        if tok.text in ("goto", "typedef"):
            raise self.fail(f"{tok.text!r} is outside the supported subset")
        if tok.text in ("case", "default"):
            raise self.fail(f"{tok.text!r} label outside of switch")
        expr = self.parse_expr()
        self.expect(";")
        return [expr]

    def parse_declaration(self) -> list[AstNode]:
        start = self.cur()
        base = self.parse_type_spec()
        nodes: list[AstNode] = []
        while True:
            name_tok, type_str = self.parse_declarator_head(base)
            dim_nodes: list[AstNode] = []
            type_str = self.parse_array_suffix(type_str, dim_nodes)
            self.declare(name_tok.text, type_str)
            children = list(dim_nodes)
            if self.accept("="):
                children.extend(self.parse_initializer())
            nodes.append(AstNode("declaration", name_tok.text, children, type_str, start.pos))
            if not self.accept(","):
                break
        self.expect(";")
        return nodes

    def _branch_node(self, pos: int) -> AstNode:
        stmts = self.parse_statement()
        if len(stmts) == 1:
            return stmts[0]
        return AstNode("seq", "", stmts, pos=pos)

    def parse_if(self) -> AstNode:
        tok = self.advance()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        children = [cond, self._branch_node(tok.pos)]
        if self.accept("else"):
            children.append(self._branch_node(tok.pos))
        return AstNode("if-cond", "if", children, pos=tok.pos)

    def parse_while(self) -> AstNode:
        tok = self.advance()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.loop_depth += 1
        body = self._branch_node(tok.pos)
        self.loop_depth -= 1
        return AstNode("while-loop", "while", [cond, body], pos=tok.pos)

    def parse_do_while(self) -> AstNode:
        tok = self.advance()
        self.loop_depth += 1
        body = self._branch_node(tok.pos)
        self.loop_depth -= 1
        self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect(";")
        return AstNode("do-while-loop", "do-while", [body, cond], pos=tok.pos)

    def parse_for(self) -> AstNode:
        tok = self.advance()
        self.expect("(")
        self.push_scope()
        empty = lambda: AstNode("seq", "", [], pos=tok.pos)
        if self.at(";"):
            self.advance()
            init = empty()
        elif self.at_type_start():
            decls = self.parse_declaration()  # consumes ';'
            init = decls[0] if len(decls) == 1 else AstNode("seq", "", decls, pos=tok.pos)
        else:
            init = self.parse_expr()
            self.expect(";")
        cond = empty() if self.at(";") else self.parse_expr()
        self.expect(";")
        inc = empty() if self.at(")") else self.parse_expr()
        self.expect(")")
        self.loop_depth += 1
        body = self._branch_node(tok.pos)
        self.loop_depth -= 1
        self.pop_scope()
        return AstNode("for-loop", "for", [init, cond, inc, body], pos=tok.pos)

    def parse_switch(self) -> AstNode:
        tok = self.advance()
        self.expect("(")
        ctrl = self.parse_expr()
        self.expect(")")
        self.expect("{")
        self.switch_depth += 1
        self.push_scope()
        arms: list[AstNode] = []
        while not self.at("}"):
            if not (self.at("case") or self.at("default")):
                raise self.fail("switch body must start with 'case' or 'default'")
            labels: list[AstNode] = []
            is_default = False
            while self.at("case") or self.at("default"):
                if self.advance().text == "default":
                    is_default = True
                else:
                    labels.append(self.parse_conditional())
                self.expect(":")
            stmts: list[AstNode] = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                stmts.extend(self.parse_statement())
            arms.append(AstNode(
                "seq",
                "default" if is_default else "case",
                [AstNode("seq", "case-labels", labels, pos=tok.pos),
                 AstNode("seq", "", stmts, pos=tok.pos)],
                pos=tok.pos,
            ))
        self.expect("}")
        self.pop_scope()
        self.switch_depth -= 1
        return AstNode("switch-cond", "switch", [ctrl] + arms, pos=tok.pos)

    # ------------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------------

    def parse_expr(self) -> AstNode:
        node = self.parse_assignment()
        while self.at(","):
            tok = self.advance()
            rhs = self.parse_assignment()
            node = AstNode("binary-op", ",", [node, rhs], rhs.type_of, tok.pos)
        return node

    def parse_assignment(self) -> AstNode:
        lhs = self.parse_conditional()
        tok = self.cur()
        if tok.kind == "punct" and tok.text in ASSIGN_OPS:
            self.advance()
            rhs = self.parse_assignment()
            return AstNode("assignment", tok.text, [lhs, rhs], lhs.type_of, tok.pos)
        return lhs

    def parse_conditional(self) -> AstNode:
        cond = self.parse_binary(0)
        if not self.at("?"):
            return cond
        tok = self.advance()
        then = self.parse_expr()
        self.expect(":")
        alt = self.parse_conditional()
        return AstNode("if-cond", "?:", [cond, then, alt],
                       common_type(then.type_of, alt.type_of), tok.pos)

    def parse_binary(self, level: int) -> AstNode:
        if level >= len(_BINARY_LEVELS):
            return self.parse_unary()
        ops, mode = _BINARY_LEVELS[level]
        node = self.parse_binary(level + 1)
        while self.cur().kind == "punct" and self.cur().text in ops:
            tok = self.advance()
            rhs = self.parse_binary(level + 1)
            node = AstNode("binary-op", tok.text, [node, rhs],
                           self._binary_type(mode, tok.text, node, rhs), tok.pos)
        return node

    def _binary_type(self, mode: str, op: str, lhs: AstNode, rhs: AstNode) -> str | None:
        if mode in ("logical", "compare"):
            return "int"
        if mode == "shift":
            return lhs.type_of
        if op == "-" and is_pointer(lhs.type_of) and is_pointer(rhs.type_of):
            return "long"
        return common_type(lhs.type_of, rhs.type_of)

    def parse_unary(self) -> AstNode:
        tok = self.cur()
        if tok.kind == "punct" and tok.text in ("++", "--", "+", "-", "!", "~", "*", "&"):
            self.advance()
            operand = self.parse_unary()
            type_of = self._unary_type(tok.text, operand)
            return AstNode("unary-op", tok.text, [operand], type_of, tok.pos)
        if tok.text == "sizeof":
            self.advance()
            if self.at("(") and self.peek().kind == "keyword" and self.peek().text in TYPE_START:
                self.advance()
                base = self.parse_type_spec()
                self.parse_pointers(base)
                self.expect(")")
                return AstNode("unary-op", "sizeof", [], "int", tok.pos)
            operand = self.parse_unary()
            return AstNode("unary-op", "sizeof", [operand], "int", tok.pos)
        if tok.text == "(" and self.peek().kind == "keyword" and self.peek().text in TYPE_START:
            self.advance()
            base = self.parse_type_spec()
            cast_type = self.parse_pointers(base)
            self.expect(")")
            operand = self.parse_unary()
            operand.type_of = cast_type  # casts are transparent
            return operand
        return self.parse_postfix()

    def _unary_type(self, op: str, operand: AstNode) -> str | None:
        if op == "!":
            return "int"
        if op == "*":
            return deref(operand.type_of)
        if op == "&":
            return None if operand.type_of is None else decay(operand.type_of) + "*"
        return operand.type_of

    def parse_postfix(self) -> AstNode:
        node = self.parse_primary()
        while True:
            tok = self.cur()
            if self.at("["):
                self.advance()
                index = self.parse_expr()
                self.expect("]")
                node = AstNode("subscript", "[]", [node, index],
                               deref(node.type_of), tok.pos)
            elif self.at("("):
                if node.kind != "identifier":
                    raise self.fail("call target must be a plain function name")
                self.advance()
                args: list[AstNode] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_assignment())
                        if not self.accept(","):
                            break
                self.expect(")")
                node = AstNode("call", node.label, args,
                               self.func_returns.get(node.label, "int"), node.pos)
            elif self.at(".") or self.at("->"):
                op = self.advance().text
                field = self.expect_ident("field name").text
                node = AstNode("field-access", op + field, [node],
                               self._field_type(node.type_of, op, field), tok.pos)
            elif self.at("++") or self.at("--"):
                op = self.advance().text
                node = AstNode("unary-op", op, [node], node.type_of, tok.pos)
            else:
                return node

    def _field_type(self, receiver: str | None, op: str, field: str) -> str | None:
        if receiver is None:
            return None
        if op == "->":
            receiver = deref(receiver)
            if receiver is None:
                return None
        if receiver.startswith(("struct ", "union ")):
            tag = receiver.split(" ", 1)[1]
            return self.structs.get(tag, {}).get(field)
        return None

    def parse_primary(self) -> AstNode:
        tok = self.cur()
        if tok.kind == "ident":
            self.advance()
            return AstNode("identifier", tok.text, [], self.lookup(tok.text), tok.pos)
        if tok.kind in ("int", "float", "char"):
            self.advance()
            type_of = {"int": _int_literal_type(tok.text),
                       "float": _float_literal_type(tok.text),
                       "char": "char"}[tok.kind]
            return AstNode("numeric-literal", tok.text, [], type_of, tok.pos)
        if tok.kind == "string":
            self.advance()
            return AstNode("string-literal", tok.text, [], "char*", tok.pos)
        if self.at("("):
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        raise self.fail(f"expected an expression, found {tok.text!r}")


def _int_value(text: str) -> int:
    text = text.rstrip("uUlL")
    if text.lower().startswith("0x"):
        return int(text, 16)
    if len(text) > 1 and text.startswith("0"):
        return int(text, 8)
    return int(text)


def _int_literal_type(text: str) -> str:
    suffix = ""
    while text and text[-1] in "uUlL":
        suffix = text[-1].lower() + suffix
        text = text[:-1]
    unsigned = "u" in suffix
    longs = suffix.count("l")
    base = "long long" if longs >= 2 else ("long" if longs == 1 else "int")
    return f"unsigned {base}" if unsigned else base


def _float_literal_type(text: str) -> str:
    return "float" if text[-1] in "fF" else "double"
