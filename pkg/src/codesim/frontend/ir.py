"""Parsed-function intermediate representation."""

from __future__ import annotations

from dataclasses import dataclass, field

AST_KINDS = frozenset({
    "function-def", "seq", "for-loop", "while-loop", "do-while-loop",
    "if-cond", "switch-cond", "binary-op", "unary-op", "call", "field-access",
    "subscript", "identifier", "numeric-literal", "string-literal",
    "declaration", "assignment", "return", "break", "continue",
})

LOOP_KINDS = frozenset({"for-loop", "while-loop", "do-while-loop"})
COND_KINDS = frozenset({"if-cond", "switch-cond"})


@dataclass
class SourceUnit:
    """One source file plus the project it belongs to.

    project_id is the unit of IDF computation and must be stable across
    re-indexing runs of the same tree.
    """

    path: str
    text: str
    project_id: str


@dataclass
class AstNode:
    kind: str
    label: str = ""
    children: list["AstNode"] = field(default_factory=list)
    type_of: str | None = None
    pos: int = 0

    def walk(self):
        """Yield this node and all descendants, preorder."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass
class CfgNode:
    kind: str  # entry | stmt | cond | join
    label: str = ""


@dataclass
class Cfg:
    nodes: list[CfgNode]
    edges: list[list[int]]  # ordered successor lists
    entry: int = 0

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class CallSite:
    name: str
    status: str = "unresolved"  # unresolved | modeled | user-defined | local | unmodeled
    header: str = ""
    directory: str = ""


@dataclass
class FunctionIR:
    id: str
    name: str
    path: str
    project_id: str
    line: int
    params: list[tuple[str, str]]  # (name, canonical type), source order
    return_type: str
    locals: set[tuple[str, str]]
    ast: AstNode
    cfg: Cfg
    comments: list[str]
    calls: list[CallSite]
    source_span: tuple[int, int]


def make_function_id(path: str, name: str, line: int) -> str:
    return f"{path}:{name}:{line}"
