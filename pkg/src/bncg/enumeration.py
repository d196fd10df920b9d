"""Canonical forms, fingerprints and isomorph-free enumeration of small graphs.

General graphs are canonicalised by colour refinement followed by
individualisation, taking the lexicographically smallest relabelled adjacency
over all leaves of the search tree.  Trees use a centre-rooted AHU string,
which is linear-ish and copes with the large automorphism groups of stretched
trees.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from .graph import Graph, _bits, is_connected, is_tree

GRAPH_CAP = 8
TREE_CAP = 16


class EnumerationCapExceeded(ValueError):
    """Requested size is beyond the configured enumeration cap."""


# -- general graphs ---------------------------------------------------------


def _refine(adj: tuple[int, ...], cells: list[int]) -> list[int]:
    """Refine an ordered partition (list of bitmasks) until it is equitable.

    New cells are ordered by (parent cell position, neighbour-count signature),
    so the result depends only on the isomorphism type of (graph, partition).
    """
    while True:
        out: list[int] = []
        for cell in cells:
            if cell & (cell - 1) == 0:
                out.append(cell)
                continue
            groups: dict[tuple[int, ...], int] = {}
            for v in _bits(cell):
                sig = tuple((adj[v] & c).bit_count() for c in cells)
                groups[sig] = groups.get(sig, 0) | (1 << v)
            out.extend(groups[s] for s in sorted(groups))
        if len(out) == len(cells):
            return out
        cells = out


def _certificate(adj: tuple[int, ...], order: list[int]) -> tuple[int, ...]:
    pos = {v: i for i, v in enumerate(order)}
    cert = []
    for v in order:
        row = 0
        for w in _bits(adj[v]):
            row |= 1 << (len(order) - 1 - pos[w])
        cert.append(row)
    return tuple(cert)


def _search(adj, cells, best):
    cells = _refine(adj, cells)
    target = next((i for i, c in enumerate(cells) if c & (c - 1)), None)
    if target is None:
        order = [c.bit_length() - 1 for c in cells]
        cert = _certificate(adj, order)
        if best[0] is None or cert < best[0]:
            best[0], best[1] = cert, order
        return
    cell = cells[target]
    tried_twins: list[int] = []
    for v in _bits(cell):
        # twins (same neighbourhood apart from each other) give identical subtrees
        if any((adj[v] & ~(1 << u)) == (adj[u] & ~(1 << v)) for u in tried_twins):
            continue
        tried_twins.append(v)
        split = cells[:target] + [1 << v, cell & ~(1 << v)] + cells[target + 1 :]
        _search(adj, split, best)


def canonical_labeling(g: Graph) -> list[int]:
    """Return ``order`` with ``order[i]`` the old label of canonical node ``i``."""
    if g.n == 0:
        return []
    if is_tree(g):
        return _tree_canonical_order(g)
    adj = g.adjacency
    degs: dict[int, int] = {}
    for v in range(g.n):
        d = adj[v].bit_count()
        degs[d] = degs.get(d, 0) | (1 << v)
    best: list = [None, None]
    _search(adj, [degs[d] for d in sorted(degs)], best)
    return best[1]


def canonical_form(g: Graph) -> Graph:
    order = canonical_labeling(g)
    new = {old: i for i, old in enumerate(order)}
    return Graph.from_edges(g.n, [(new[u], new[v]) for u, v in g.edges])


def fingerprint(g: Graph) -> str:
    """Isomorphism-invariant string ``"n:u-v,..."`` of the canonical edge list."""
    c = canonical_form(g)
    return f"{g.n}:" + ",".join(f"{u}-{v}" for u, v in c.sorted_edges())


def labeled_fingerprint(g: Graph) -> str:
    return f"{g.n}:" + ",".join(f"{u}-{v}" for u, v in g.sorted_edges())


def _check_cap(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > cap:
        raise EnumerationCapExceeded(f"n={n} exceeds enumeration cap {cap}")


def _sort_key(g: Graph):
    return (g.m, g.sorted_edges())


@lru_cache(maxsize=None)
def _graphs(n: int, connected: bool) -> tuple[Graph, ...]:
    if n == 1:
        return (Graph(1),)
    seen: dict[str, Graph] = {}
    for base in _graphs(n - 1, connected):
        # every connected graph has a vertex whose removal keeps it connected
        for mask in range(1 if connected else 0, 1 << (n - 1)):
            edges = set(base.edges)
            edges.update((v, n - 1) for v in _bits(mask))
            cand = canonical_form(Graph(n, frozenset(edges)))
            key = labeled_fingerprint(cand)
            if key not in seen:
                seen[key] = cand
    return tuple(sorted(seen.values(), key=_sort_key))


def enumerate_graphs(n: int, connected_only: bool = True, cap: int = GRAPH_CAP) -> Iterator[Graph]:
    """One canonically labelled representative per isomorphism class.

    Order is by edge count, then by sorted canonical edge list.
    """
    _check_cap(n, cap)
    graphs = _graphs(n, connected_only)
    if connected_only:
        graphs = tuple(g for g in graphs if is_connected(g))
    return iter(graphs)


# -- trees ------------------------------------------------------------------


def tree_centers(g: Graph) -> list[int]:
    if g.n <= 2:
        return list(range(g.n))
    deg = [g.degree(v) for v in range(g.n)]
    layer = [v for v in range(g.n) if deg[v] == 1]
    left = g.n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for w in g.neighbors(v):
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def _ahu(g: Graph, root: int, parent: int = -1) -> str:
    kids = sorted(_ahu(g, w, root) for w in g.neighbors(root) if w != parent)
    return "(" + "".join(kids) + ")"


def tree_string(g: Graph) -> str:
    """Canonical string of an unlabelled tree (minimum over its centres)."""
    return min(_ahu(g, c) for c in tree_centers(g))


def _tree_canonical_order(g: Graph) -> list[int]:
    best = None
    for c in tree_centers(g):
        s = _ahu(g, c)
        if best is None or s < best[0]:
            best = (s, c)
    root = best[1]

    memo: dict[tuple[int, int], str] = {}

    def code(v: int, parent: int) -> str:
        key = (v, parent)
        if key not in memo:
            memo[key] = "(" + "".join(sorted(code(w, v) for w in g.neighbors(v) if w != parent)) + ")"
        return memo[key]

    # BFS from the root, visiting children in canonical-string order
    order = [root]
    parent = {root: -1}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        kids = [w for w in g.neighbors(v) if w != parent[v]]
        kids.sort(key=lambda w: code(w, v))
        for w in kids:
            parent[w] = v
            order.append(w)
    return order


@lru_cache(maxsize=None)
def _trees(n: int) -> tuple[Graph, ...]:
    if n == 1:
        return (Graph(1),)
    seen: dict[str, Graph] = {}
    for base in _trees(n - 1):
        for v in range(n - 1):
            cand = Graph(n, base.edges | {(v, n - 1)})
            s = tree_string(cand)
            if s not in seen:
                seen[s] = canonical_form(cand)
    return tuple(seen[s] for s in sorted(seen))


def enumerate_free_trees(n: int, cap: int = TREE_CAP) -> Iterator[Graph]:
    """One representative per unlabelled tree, ordered by canonical string.

    Representatives are labelled by BFS from the canonical centre.
    """
    _check_cap(n, cap)
    return iter(_trees(n))
