"""Independent reference implementations used only by tests.

These deliberately avoid the production code paths they check: the exact
tree edit distance is the classic Zhang-Shasha dynamic program, and the
top-k oracle is a full sort.
"""

from __future__ import annotations

from codesim.features import LabeledTree, tree_size
from codesim.similarity import combined_similarity, similarity_vector


def _postorder_nodes(tree: LabeledTree) -> list[LabeledTree]:
    nodes: list[LabeledTree] = []

    def visit(node: LabeledTree):
        for child in node.children:
            visit(child)
        nodes.append(node)

    visit(tree)
    return nodes


def _annotate(tree: LabeledTree):
    nodes = _postorder_nodes(tree)
    index = {id(node): i for i, node in enumerate(nodes)}

    def leftmost(node: LabeledTree) -> int:
        while node.children:
            node = node.children[0]
        return index[id(node)]

    lmd = [leftmost(node) for node in nodes]
    keyroots = sorted({lmd[i]: i for i in range(len(nodes))}.values())
    labels = [node.label for node in nodes]
    return labels, lmd, keyroots


def exact_tree_edit_distance(a: LabeledTree | None, b: LabeledTree | None) -> int:
    """Zhang-Shasha exact tree edit distance with unit costs."""
    if a is None:
        return tree_size(b)
    if b is None:
        return tree_size(a)
    la, lmda, kra = _annotate(a)
    lb, lmdb, krb = _annotate(b)
    m, n = len(la), len(lb)
    td = [[0] * n for _ in range(m)]

    def treedist(i: int, j: int):
        li, lj = lmda[i], lmdb[j]
        rows = i - li + 2
        cols = j - lj + 2
        fd = [[0] * cols for _ in range(rows)]
        ioff = li - 1
        joff = lj - 1
        for x in range(1, rows):
            fd[x][0] = fd[x - 1][0] + 1
        for y in range(1, cols):
            fd[0][y] = fd[0][y - 1] + 1
        for x in range(1, rows):
            for y in range(1, cols):
                if lmda[x + ioff] == li and lmdb[y + joff] == lj:
                    fd[x][y] = min(
                        fd[x - 1][y] + 1,
                        fd[x][y - 1] + 1,
                        fd[x - 1][y - 1] + (la[x + ioff] != lb[y + joff]),
                    )
                    td[x + ioff][y + joff] = fd[x][y]
                else:
                    p = lmda[x + ioff] - 1 - ioff
                    q = lmdb[y + joff] - 1 - joff
                    fd[x][y] = min(
                        fd[x - 1][y] + 1,
                        fd[x][y - 1] + 1,
                        fd[p][q] + td[x + ioff][y + joff],
                    )

    for i in kra:
        for j in krb:
            treedist(i, j)
    return td[m - 1][n - 1]


def brute_force_top_k(db, query, weights, k, candidate_ids=None) -> list[str]:
    """Score every candidate, stable full sort, take the prefix."""
    scored = []
    for rid in (db.ids() if candidate_ids is None else list(candidate_ids)):
        sims = similarity_vector(query, db.get(rid).feature_vector)
        scored.append((combined_similarity(sims, weights), rid))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [rid for _, rid in scored[:k]]


def strip_operator_leaves(tree: LabeledTree | None) -> LabeledTree | None:
    """Remove non-structural leaves, re-dropping Seq nodes left empty."""
    if tree is None:
        return None

    def strip(node: LabeledTree) -> list[LabeledTree]:
        if node.label not in ("Seq", "Loop", "Cond"):
            return []
        kept = [c for child in node.children for c in strip(child)]
        if node.label == "Seq" and not kept:
            return []
        return [LabeledTree(node.label, tuple(kept))]

    out = strip(tree)
    return out[0] if out else None
