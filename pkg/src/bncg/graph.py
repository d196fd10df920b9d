"""Undirected simple graphs on nodes ``0..n-1`` and hop-distance queries.

Distances to nodes in another component are ``math.inf`` (``UNREACHABLE``),
which compares greater than every finite hop count.  Aggregate distance costs
keep unreachable nodes as a separate count instead of folding in a huge
constant, see :class:`bncg.game.ExtendedCost`.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

UNREACHABLE = math.inf


class GraphError(ValueError):
    """Malformed graph or a node outside ``[0, n)``."""


class NotATreeError(GraphError):
    pass


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph.

    ``edges`` holds each unordered pair once as ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()
    _adj: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"node count must be non-negative, got {self.n}")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {e} has an endpoint outside [0, {self.n})")
            norm.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [0] * self.n
        for u, v in norm:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        object.__setattr__(self, "_adj", tuple(adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def from_adjacency(cls, adj: Iterable[int]) -> "Graph":
        """Build from per-node neighbour bitmasks."""
        adj = list(adj)
        edges = set()
        for u, mask in enumerate(adj):
            m = mask >> (u + 1)
            v = u + 1
            while m:
                if m & 1:
                    edges.add((u, v))
                m >>= 1
                v += 1
        return cls(len(adj), frozenset(edges))

    @property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbour sets as integer bitmasks, one per node."""
        return self._adj

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def neighbors(self, u: int) -> list[int]:
        self._check_node(u)
        return _bits(self._adj[u])

    def degree(self, u: int) -> int:
        self._check_node(u)
        return self._adj[u].bit_count()

    def non_edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if not (self._adj[u] >> v) & 1:
                    yield (u, v)

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        return Graph(self.n, self.edges | {_norm(*e) for e in edges})

    def remove_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        return Graph(self.n, self.edges - {_norm(*e) for e in edges})

    def _check_node(self, u: int) -> None:
        if not (0 <= u < self.n):
            raise GraphError(f"node {u} outside [0, {self.n})")

    def __str__(self) -> str:
        body = ", ".join(f"{u}-{v}" for u, v in self.sorted_edges())
        return f"Graph(n={self.n}: {body})"


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def bfs_profile(adj: tuple[int, ...] | list[int], src: int) -> tuple[int, int]:
    """Return ``(unreachable count, sum of finite distances)`` from ``src``.

    Works on raw neighbour bitmasks; this is the hot path of every checker.
    """
    seen = frontier = 1 << src
    total = 0
    level = 0
    while frontier:
        level += 1
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        nxt &= ~seen
        if not nxt:
            break
        total += level * nxt.bit_count()
        seen |= nxt
        frontier = nxt
    return len(adj) - seen.bit_count(), total


def distances_from(g: Graph, u: int) -> list[float]:
    """Hop distances from ``u``; ``UNREACHABLE`` for other components."""
    g._check_node(u)
    dist: list[float] = [UNREACHABLE] * g.n
    dist[u] = 0
    queue = deque([u])
    adj = g.adjacency
    while queue:
        x = queue.popleft()
        for y in _bits(adj[x]):
            if dist[y] == UNREACHABLE:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def total_distance(g: Graph, u: int):
    """Distance cost of ``u`` as ``ExtendedCost(unreachable, finite sum)``."""
    from .game import ExtendedCost

    g._check_node(u)
    unreach, total = bfs_profile(g.adjacency, u)
    return ExtendedCost(unreach, total)


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return bfs_profile(g.adjacency, 0)[0] == 0


def diameter(g: Graph) -> float:
    if not is_connected(g):
        return UNREACHABLE
    return max((max(distances_from(g, u)) for u in range(g.n)), default=0)


def is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.m == g.n - 1 and is_connected(g)


def _require_tree(g: Graph) -> None:
    if not is_tree(g):
        raise NotATreeError(f"expected a connected tree, got {g}")


def components_after_removal(g: Graph, r: int) -> list[int]:
    """Sizes of the components left when node ``r`` is deleted."""
    adj = [a & ~(1 << r) for a in g.adjacency]
    left = ((1 << g.n) - 1) & ~(1 << r)
    sizes = []
    while left:
        low = left & -left
        seen = frontier = low
        while frontier:
            nxt = 0
            for x in _bits(frontier):
                nxt |= adj[x]
            frontier = nxt & ~seen
            seen |= frontier
        sizes.append(seen.bit_count())
        left &= ~seen
    return sizes


def one_medians(g: Graph) -> list[int]:
    """All nodes of minimum distance cost in a tree (one or two of them)."""
    _require_tree(g)
    costs = [bfs_profile(g.adjacency, u)[1] for u in range(g.n)]
    best = min(costs)
    medians = [u for u, c in enumerate(costs) if c == best]
    for r in medians:
        # equivalent characterisation: no component larger than n/2
        assert 2 * max(components_after_removal(g, r), default=0) <= g.n
    assert 1 <= len(medians) <= 2
    return medians


@dataclass(frozen=True)
class TreeView:
    """A tree rooted at ``root`` with layers, parents and subtree sizes."""

    root: int
    parent: tuple[int | None, ...]
    layer: tuple[int, ...]
    subtree_size: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]  # BFS order from the root

    @property
    def depth(self) -> int:
        return max(self.layer)

    @property
    def n(self) -> int:
        return len(self.layer)

    def subtree(self, u: int) -> list[int]:
        out, stack = [], [u]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return sorted(out)

    def subtree_depth(self, u: int) -> int:
        base = self.layer[u]
        return max(self.layer[x] for x in self.subtree(u)) - base


def tree_view(g: Graph, root: int) -> TreeView:
    _require_tree(g)
    g._check_node(root)
    parent: list[int | None] = [None] * g.n
    layer = [0] * g.n
    children: list[list[int]] = [[] for _ in range(g.n)]
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for y in g.neighbors(x):
            if y not in seen:
                seen.add(y)
                parent[y] = x
                layer[y] = layer[x] + 1
                children[x].append(y)
                order.append(y)
    size = [1] * g.n
    for x in reversed(order):
        if parent[x] is not None:
            size[parent[x]] += size[x]
    return TreeView(
        root=root,
        parent=tuple(parent),
        layer=tuple(layer),
        subtree_size=tuple(size),
        children=tuple(tuple(c) for c in children),
        order=tuple(order),
    )


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph relabelled to ``0..k-1``; also returns the old labels."""
    keep = sorted(set(nodes))
    index = {v: i for i, v in enumerate(keep)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph.from_edges(len(keep), edges), keep


# -- file formats -----------------------------------------------------------


def to_edgelist(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def from_edgelist(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise GraphError("empty edge-list input")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise GraphError(f"malformed edge list: {exc}") from None
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, found {len(edges)}")
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise GraphError("duplicate edges in edge list")
    return g


def to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}


def from_json(obj: dict | str) -> Graph:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        return Graph.from_edges(int(obj["n"]), [(int(u), int(v)) for u, v in obj["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from None


def read_graph(text: str) -> Graph:
    """Parse either supported format, sniffing JSON by its leading brace."""
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_edgelist(text)
