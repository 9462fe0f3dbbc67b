"""Path search in ordered trees with at most four labelled children per node.

A root-to-node path of length n is a sequence of edge labels (p, q), which is
read directly as a codeword: at step alpha take edge ``pairs[alpha]``.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping

from .codec import LABELS, Codeword, build_list, encode
from .errors import DecodingError
from .grover import ReflectionAboutCodeword, grover_step
from .sampler import RandomSource, collect_until_complete, reconstruct

__all__ = [
    "OrderedTree",
    "TreePath",
    "QuantumFindResult",
    "path_to_codeword",
    "codeword_to_path",
    "classical_find",
    "quantum_find",
    "complete_tree",
    "random_tree",
]

NodeId = Hashable
Label = tuple[int, int]
TreePath = tuple[Label, ...]


class OrderedTree:
    """Immutable rooted tree; children are keyed by their edge label."""

    def __init__(self, root: NodeId, edges: Iterable[tuple[NodeId, Label, NodeId]]):
        children: dict[NodeId, dict[Label, NodeId]] = {root: {}}
        parent: dict[NodeId, tuple[NodeId, Label]] = {}
        for src, label, dst in edges:
            label = (int(label[0]), int(label[1]))
            if label not in LABELS:
                raise ValueError(f"edge label must be a bit pair, got {label!r}")
            if dst == root:
                raise ValueError(f"edge {src!r} -> {dst!r} points at the root")
            if dst in parent:
                raise ValueError(f"node {dst!r} has more than one parent")
            kids = children.setdefault(src, {})
            if label in kids:
                raise ValueError(f"node {src!r} already has an edge labelled {label}")
            kids[label] = dst
            children.setdefault(dst, {})
            parent[dst] = (src, label)

        depth_of = {root: 0}
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for child in children[node].values():
                depth_of[child] = depth_of[node] + 1
                queue.append(child)
        if len(depth_of) != len(children):
            # with single parents, unreachable nodes can only sit on a cycle or a detached component
            stray = sorted(map(repr, set(children) - set(depth_of)))
            raise ValueError(f"nodes not reachable from the root (cycle or detached): {stray}")

        self.root = root
        self._children = {k: dict(v) for k, v in children.items()}
        self._parent = parent
        self._depth = depth_of

    @property
    def nodes(self) -> frozenset:
        return frozenset(self._children)

    @property
    def depth(self) -> int:
        return max(self._depth.values())

    def children(self, node: NodeId) -> Mapping[Label, NodeId]:
        return dict(self._children[node])

    def node_depth(self, node: NodeId) -> int:
        return self._depth[node]

    def nodes_at_depth(self, d: int) -> list[NodeId]:
        return [node for node, k in self._depth.items() if k == d]

    def edges(self) -> Iterator[tuple[NodeId, Label, NodeId]]:
        for src, kids in self._children.items():
            for label in sorted(kids):
                yield src, label, kids[label]

    def follow(self, path: Iterable[Label]) -> NodeId:
        node = self.root
        for label in path:
            try:
                node = self._children[node][tuple(label)]
            except KeyError:
                raise ValueError(f"no edge {tuple(label)} from node {node!r}") from None
        return node

    def path_to(self, node: NodeId) -> TreePath:
        if node not in self._children:
            raise ValueError(f"unknown node {node!r}")
        labels = []
        while node != self.root:
            node, label = self._parent[node]
            labels.append(label)
        return tuple(reversed(labels))

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "edges": [{"from": s, "label": list(l), "to": d} for s, l, d in self.edges()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "OrderedTree":
        return cls(obj["root"], ((e["from"], tuple(e["label"]), e["to"]) for e in obj["edges"]))

    def __repr__(self) -> str:
        return f"OrderedTree(root={self.root!r}, nodes={len(self._children)}, depth={self.depth})"


def path_to_codeword(p: Iterable[Label]) -> Codeword:
    p = tuple(p)
    if not p:
        raise ValueError("path must contain at least one edge")
    return Codeword(p)


def codeword_to_path(cw: Codeword) -> TreePath:
    return cw.pairs


def classical_find(t: OrderedTree, target: NodeId, n: int) -> tuple[TreePath, int]:
    """Visit depth-n nodes in label order until ``target``; return its path and the visit count."""
    if target not in t.nodes:
        raise ValueError(f"target {target!r} is not in the tree")
    if t.node_depth(target) != n:
        raise ValueError(f"target {target!r} is at depth {t.node_depth(target)}, not {n}")
    examined = 0
    stack: list[tuple[NodeId, TreePath]] = [(t.root, ())]
    while stack:
        node, path = stack.pop()
        if len(path) == n:
            examined += 1
            if node == target:
                return path, examined
            continue
        kids = t._children[node]
        for label in sorted(kids, reverse=True):
            stack.append((kids[label], path + (label,)))
    raise AssertionError("target at depth n was not enumerated")


@dataclass(frozen=True)
class QuantumFindResult:
    path: TreePath
    oracle_queries: int
    measurement_runs: int


def quantum_find(
    t: OrderedTree,
    target: NodeId,
    n: int,
    rng: RandomSource,
    max_runs: int | None = None,
) -> QuantumFindResult:
    """Locate ``target`` with one search-operator application plus decoding.

    The simulator builds the oracle from the root-to-target path; that lookup
    stands in for the marking function and is not counted as a query.
    """
    if target not in t.nodes:
        raise ValueError(f"target {target!r} is not in the tree")
    if t.node_depth(target) != n:
        raise ValueError(f"target {target!r} is at depth {t.node_depth(target)}, not {n}")
    s = path_to_codeword(t.path_to(target))
    out = grover_step(ReflectionAboutCodeword(s), build_list(n))
    record = collect_until_complete(out, n, rng, max_runs)
    if record.conflict:
        raise DecodingError("conflicting clicks while decoding a codeword state")
    path = codeword_to_path(encode(reconstruct(record)))
    if t.follow(path) != target:
        raise DecodingError(f"decoded path {path} does not reach {target!r}")
    return QuantumFindResult(path, 1, record.runs)


def complete_tree(depth: int) -> OrderedTree:
    """Full 4-ary tree; nodes are numbered breadth first with labels in order."""
    edges = []
    frontier = [0]
    next_id = 1
    for _ in range(depth):
        nxt = []
        for node in frontier:
            for label in LABELS:
                edges.append((node, label, next_id))
                nxt.append(next_id)
                next_id += 1
        frontier = nxt
    return OrderedTree(0, edges)


def random_tree(depth: int, child_prob: float, seed: int) -> OrderedTree:
    """Random ordered tree of exactly ``depth`` levels.

    A random spine of length ``depth`` guarantees at least one deepest node;
    every other (node, label) slot above the last level is filled with
    probability ``child_prob``. Nodes are numbered breadth first.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    if not 0.0 <= child_prob <= 1.0:
        raise ValueError("child_prob must lie in [0, 1]")
    r = random.Random(seed)
    spine = [r.choice(LABELS) for _ in range(depth)]
    edges = []
    frontier = [(0, True)]
    next_id = 1
    for level in range(depth):
        nxt = []
        for node, on_spine in frontier:
            for label in LABELS:
                keep_spine = on_spine and label == spine[level]
                if keep_spine or r.random() < child_prob:
                    edges.append((node, label, next_id))
                    nxt.append((next_id, keep_spine))
                    next_id += 1
        frontier = nxt
    return OrderedTree(0, edges)
