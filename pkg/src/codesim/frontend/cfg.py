"""Control-flow graph construction (rules pinned in docs/c-subset.md).

Statement-granular: one node per simple statement or condition, join nodes
where control re-converges, a synthetic entry node, and returns as sinks.
Successor order is source order (then/body first), which makes BFS/DFS
subgraph extraction deterministic.
"""

from __future__ import annotations

from .ir import AstNode, Cfg, CfgNode


def build_cfg(ast: AstNode) -> Cfg:
    """Build the CFG of a function-def AST root."""
    if ast.kind != "function-def":
        raise ValueError("build_cfg expects a function-def root")
    builder = _Builder()
    entry = builder.new("entry")
    builder.build(ast.children[0], [entry])
    return builder.finish()


class _Builder:
    def __init__(self):
        self.nodes: list[CfgNode] = []
        self.edges: list[list[int]] = []
        self.break_targets: list[int] = []
        self.continue_targets: list[int] = []

    def new(self, kind: str, label: str = "") -> int:
        self.nodes.append(CfgNode(kind, label))
        self.edges.append([])
        return len(self.nodes) - 1

    def edge(self, src: int, dst: int):
        self.edges[src].append(dst)

    def connect(self, preds: list[int], dst: int):
        for p in preds:
            self.edge(p, dst)

    def build(self, node: AstNode, preds: list[int]) -> list[int]:
        """Wire `node` after `preds`; return the dangling exits."""
        kind = node.kind
        if kind == "seq":
            for child in node.children:
                preds = self.build(child, preds)
            return preds
        if kind == "return":
            idx = self.new("stmt", "return")
            self.connect(preds, idx)
            return []  # returns are sinks; there is no synthetic exit node
        if kind == "break":
            idx = self.new("stmt", "break")
            self.connect(preds, idx)
            self.edge(idx, self.break_targets[-1])
            return []
        if kind == "continue":
            idx = self.new("stmt", "continue")
            self.connect(preds, idx)
            self.edge(idx, self.continue_targets[-1])
            return []
        if kind == "if-cond" and len(node.children) >= 2 and _is_statement_context(node):
            return self._build_if(node, preds)
        if kind == "while-loop":
            return self._build_while(node, preds)
        if kind == "do-while-loop":
            return self._build_do_while(node, preds)
        if kind == "for-loop":
            return self._build_for(node, preds)
        if kind == "switch-cond":
            return self._build_switch(node, preds)
        # simple statement
        idx = self.new("stmt", kind if kind != "declaration" else f"decl {node.label}")
        self.connect(preds, idx)
        return [idx]

    def _build_arm(self, body: AstNode, cond: int, join: int) -> list[int]:
        """Build one branch of a conditional; an empty branch is a direct edge."""
        mark = len(self.nodes)
        out = self.build(body, [cond])
        if len(self.nodes) == mark:
            if join not in self.edges[cond]:
                self.edge(cond, join)
            return []
        return out

    def _build_if(self, node: AstNode, preds: list[int]) -> list[int]:
        cond = self.new("cond", "if")
        self.connect(preds, cond)
        join = self.new("join", "if.end")
        then_out = self._build_arm(node.children[1], cond, join)
        if len(node.children) > 2:
            else_out = self._build_arm(node.children[2], cond, join)
        else:
            else_out = []
            if join not in self.edges[cond]:
                self.edge(cond, join)
        self.connect(then_out, join)
        self.connect(else_out, join)
        return [join]

    def _build_while(self, node: AstNode, preds: list[int]) -> list[int]:
        cond = self.new("cond", "while")
        self.connect(preds, cond)
        join = self.new("join", "while.end")
        self.break_targets.append(join)
        self.continue_targets.append(cond)
        body_out = self.build(node.children[1], [cond])
        self.break_targets.pop()
        self.continue_targets.pop()
        self.connect(body_out, cond)
        self.edge(cond, join)
        return [join]

    def _build_do_while(self, node: AstNode, preds: list[int]) -> list[int]:
        cond = self.new("cond", "do-while")
        join = self.new("join", "do.end")
        self.break_targets.append(join)
        self.continue_targets.append(cond)
        mark = len(self.nodes)
        body_out = self.build(node.children[0], preds)
        self.break_targets.pop()
        self.continue_targets.pop()
        self.connect(body_out, cond)
        back = mark if len(self.nodes) > mark else cond
        self.edge(cond, back)
        self.edge(cond, join)
        return [join]

    def _build_for(self, node: AstNode, preds: list[int]) -> list[int]:
        init, cond_expr, inc, body = node.children
        preds = self.build(init, preds)
        cond = self.new("cond", "for")
        self.connect(preds, cond)
        join = self.new("join", "for.end")
        has_inc = not _is_empty(inc)
        inc_idx = self.new("stmt", "for.inc") if has_inc else cond
        self.break_targets.append(join)
        self.continue_targets.append(inc_idx)
        body_out = self.build(body, [cond])
        self.break_targets.pop()
        self.continue_targets.pop()
        if body_out == [cond] and has_inc:
            # empty body still runs the increment
            self.edge(cond, inc_idx)
        else:
            self.connect(body_out, inc_idx if has_inc else cond)
        if has_inc:
            self.edge(inc_idx, cond)
        self.edge(cond, join)
        return [join]

    def _build_switch(self, node: AstNode, preds: list[int]) -> list[int]:
        cond = self.new("cond", "switch")
        self.connect(preds, cond)
        join = self.new("join", "switch.end")
        self.break_targets.append(join)
        fall_through: list[int] = []
        has_default = False
        for arm in node.children[1:]:
            if arm.label == "default":
                has_default = True
            preds = [cond] + [p for p in fall_through if p != cond]
            fall_through = self.build(arm.children[1], preds)
        self.break_targets.pop()
        if not has_default or cond in fall_through:
            self.edge(cond, join)
        self.connect([p for p in fall_through if p != cond], join)
        return [join]

    def finish(self) -> Cfg:
        reachable = self._reachable_from(0)
        remap = {}
        for old in range(len(self.nodes)):
            if old in reachable:
                remap[old] = len(remap)
        nodes = [self.nodes[old] for old in sorted(remap)]
        edges = [[remap[d] for d in self.edges[old]] for old in sorted(remap)]
        return Cfg(nodes=nodes, edges=edges, entry=0)

    def _reachable_from(self, start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.edges[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def _is_empty(node: AstNode) -> bool:
    return node.kind == "seq" and not node.children


def _is_statement_context(node: AstNode) -> bool:
    # ternary expressions are kind if-cond with label '?:'
    return node.label != "?:"


def cfg_reachable_count(cfg: Cfg, start: int) -> int:
    """Number of nodes reachable from `start`, itself included."""
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in cfg.edges[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen)
