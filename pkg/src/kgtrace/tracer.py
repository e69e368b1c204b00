"""Association trees over the correlation matrix: build the top-m correlate
tree below an abnormal node, extract the greedy max-weight cause path, and
expand leaves interactively."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class TracerError(ValueError):
    pass


@dataclass(frozen=True)
class TreeNode:
    pos: int  # position index within the tree (0 = root)
    node: int  # graph node id; the same id may occur at several positions
    parent: int | None  # parent position
    weight: float  # correlation to the parent; 0.0 at the root
    depth: int
    children: tuple  # child positions


@dataclass(frozen=True)
class AssociationTree:
    root: int  # abnormal graph node id
    l: int  # level count requested at build time
    m: int  # branching degree
    nodes: tuple  # of TreeNode, index == pos

    def levels(self) -> list:
        out = {}
        out_max = 0
        for tn in self.nodes:
            out.setdefault(tn.depth, []).append(tn.pos)
            out_max = max(out_max, tn.depth)
        return [out.get(d, []) for d in range(out_max + 1)]

    def leaf_positions(self) -> list:
        return [tn.pos for tn in self.nodes if not tn.children]

    def ancestors_of(self, pos: int) -> list:
        """Graph node ids on the path from the root to this position, inclusive."""
        path = []
        cur = pos
        while cur is not None:
            tn = self.nodes[cur]
            path.append(tn.node)
            cur = tn.parent
        return path[::-1]


@dataclass(frozen=True)
class TracePath:
    nodes: tuple  # (v_1*, ..., v_l*) graph ids, root excluded
    weights: tuple
    positions: tuple


def _top_m(a_hat: np.ndarray, source: int, excluded: set, m: int) -> list:
    """(node, weight) of the m strongest correlates of `source`, excluding the
    given ids; ties break toward the lower node index."""
    row = a_hat[source]
    candidates = [i for i in range(len(row)) if i not in excluded]
    candidates.sort(key=lambda i: (-row[i], i))
    return [(i, float(row[i])) for i in candidates[:m]]


def build_association_tree(v_star: int, l: int, m: int,
                           a_hat: np.ndarray) -> AssociationTree:
    """Level-by-level top-m correlate expansion below the abnormal node.

    A node's candidates exclude itself and every ancestor on its own tree
    path; distinct branches may repeat graph nodes.
    """
    a_hat = np.asarray(a_hat, dtype=np.float64)
    n = a_hat.shape[0]
    if not 0 <= v_star < n:
        raise TracerError(f"root node {v_star} out of range [0, {n})")
    if l < 1 or m < 1:
        raise TracerError(f"levels and degree must be >= 1 (got l={l}, m={m})")

    nodes = [TreeNode(pos=0, node=v_star, parent=None, weight=0.0,
                      depth=0, children=())]
    frontier = [0]
    for depth in range(1, l + 1):
        next_frontier = []
        for parent_pos in frontier:
            nodes, new_positions = _attach_children(nodes, parent_pos, m, a_hat, depth)
            next_frontier.extend(new_positions)
        frontier = next_frontier
    return AssociationTree(root=v_star, l=l, m=m, nodes=tuple(nodes))


def _attach_children(nodes: list, parent_pos: int, m: int,
                     a_hat: np.ndarray, depth: int) -> tuple:
    parent = nodes[parent_pos]
    excluded = set()
    cur = parent_pos
    while cur is not None:
        excluded.add(nodes[cur].node)
        cur = nodes[cur].parent
    new_positions = []
    for node, weight in _top_m(a_hat, parent.node, excluded, m):
        pos = len(nodes)
        nodes.append(TreeNode(pos=pos, node=node, parent=parent_pos,
                              weight=weight, depth=depth, children=()))
        new_positions.append(pos)
    nodes[parent_pos] = replace(parent, children=tuple(new_positions))
    return nodes, new_positions


def trace_path(tree: AssociationTree) -> TracePath:
    """Greedy max-weight child chain from the root; ties break toward the
    lower graph node index."""
    nodes, weights, positions = [], [], []
    cur = tree.nodes[0]
    while cur.children:
        best = min(
            (tree.nodes[c] for c in cur.children),
            key=lambda tn: (-tn.weight, tn.node),
        )
        nodes.append(best.node)
        weights.append(best.weight)
        positions.append(best.pos)
        cur = best
    return TracePath(nodes=tuple(nodes), weights=tuple(weights),
                     positions=tuple(positions))


def expand_node(tree: AssociationTree, position: int, m: int,
                a_hat: np.ndarray) -> AssociationTree:
    """New tree with `m` children attached at a current leaf; the original
    tree is left untouched."""
    if m < 1:
        raise TracerError(f"degree must be >= 1, got {m}")
    if not 0 <= position < len(tree.nodes):
        raise TracerError(f"unknown position {position}")
    target = tree.nodes[position]
    if target.children:
        raise TracerError(f"position {position} is not a leaf")
    a_hat = np.asarray(a_hat, dtype=np.float64)
    nodes, _ = _attach_children(list(tree.nodes), position, m, a_hat,
                                target.depth + 1)
    return AssociationTree(root=tree.root, l=max(tree.l, target.depth + 1),
                           m=tree.m, nodes=tuple(nodes))


def tree_to_json(tree: AssociationTree, names=None, labels=None) -> dict:
    """Serialization consumed by the CLI printer and the explorer UI."""
    trace = trace_path(tree)
    return {
        "root": tree.root,
        "l": tree.l,
        "m": tree.m,
        "nodes": [
            {
                "id": tn.node,
                "name": names[tn.node] if names is not None else str(tn.node),
                "label": int(labels[tn.node]) if labels is not None else None,
            }
            for tn in tree.nodes
        ],
        "edges": [
            {
                "parent_pos": tn.parent,
                "child_pos": tn.pos,
                "child_id": tn.node,
                "weight": tn.weight,
            }
            for tn in tree.nodes
            if tn.parent is not None
        ],
        "trace": list(trace.positions),
    }


def render_tree_text(tree: AssociationTree, names=None) -> str:
    """Indented text rendering with weights; greedy-path nodes marked '*'."""
    trace = set(trace_path(tree).positions)

    def name_of(node):
        return names[node] if names is not None else str(node)

    lines = []

    def walk(pos, indent):
        tn = tree.nodes[pos]
        mark = " *" if pos in trace else ""
        if tn.parent is None:
            lines.append(f"{name_of(tn.node)}")
        else:
            lines.append(f"{'  ' * indent}+- {name_of(tn.node)} "
                         f"({tn.weight:.3f}){mark}")
        for c in tn.children:
            walk(c, indent + 1)

    walk(0, 0)
    return "\n".join(lines)
