"""Vectorised coalition search over a table of every labelled graph on n nodes.

For fixed n, each of the ``2**(n(n-1)/2)`` labelled graphs (indexed by the
bitmask of its edges over pairs in lexicographic order) gets its degree,
unreachable count and distance sum per node, computed once.  A coalition
move from ``g`` is then just a target graph ``t`` together with a coalition
``S`` such that every added edge lies inside ``S``, every removed edge meets
``S`` and every member of ``S`` is strictly better off in ``t``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from .game import GameParams
from .graph import Graph
from .moves import CoalitionChange

TABLE_HARD_MAX = 7


class _Table:
    def __init__(self, n: int):
        if n > TABLE_HARD_MAX:
            raise ValueError(f"target table supports n <= {TABLE_HARD_MAX}")
        self.n = n
        self.pairs = list(combinations(range(n), 2))
        self.index = {e: i for i, e in enumerate(self.pairs)}
        size = 1 << len(self.pairs)
        t = np.arange(size, dtype=np.int64)
        self.popcount = np.array([bin(i).count("1") for i in range(1 << n)], dtype=np.int16)
        adj = np.zeros((n, size), dtype=np.int16)
        for i, (a, b) in enumerate(self.pairs):
            bit = ((t >> i) & 1).astype(np.int16)
            adj[a] |= bit << b
            adj[b] |= bit << a
        self.deg = self.popcount[adj]
        self.dist = np.zeros((n, size), dtype=np.int32)
        self.unreach = np.zeros((n, size), dtype=np.int16)
        for src in range(n):
            seen = np.full(size, 1 << src, dtype=np.int16)
            frontier = seen.copy()
            for level in range(1, n):
                nxt = np.zeros(size, dtype=np.int16)
                for v in range(n):
                    nxt |= np.where((frontier >> v) & 1 == 1, adj[v], 0).astype(np.int16)
                nxt &= ~seen
                self.dist[src] += level * self.popcount[nxt]
                seen |= nxt
                frontier = nxt
            self.unreach[src] = n - self.popcount[seen]
        # node mask of every pair-set's endpoints
        self.endpoints = np.zeros(size, dtype=np.int16)
        for i, (a, b) in enumerate(self.pairs):
            self.endpoints |= (((t >> i) & 1) * ((1 << a) | (1 << b))).astype(np.int16)
        self.ids = t

    def edges_of(self, mask: int) -> tuple[tuple[int, int], ...]:
        return tuple(e for i, e in enumerate(self.pairs) if (mask >> i) & 1)

    def meeting(self, gamma: int) -> int:
        """Pair mask of all pairs with an endpoint in the node mask ``gamma``."""
        m = 0
        for i, (a, b) in enumerate(self.pairs):
            if (gamma >> a) & 1 or (gamma >> b) & 1:
                m |= 1 << i
        return m


@lru_cache(maxsize=2)
def target_table(n: int) -> _Table:
    return _Table(n)


def coalition_moves_table(g: Graph, params: GameParams, k: int, literal: bool, ctr):
    """Yield coalition moves of size <= k in canonical order."""
    n = g.n
    tab = target_table(n)
    gi = 0
    for e in g.edges:
        gi |= 1 << tab.index[e]
    p, q = params.alpha.numerator, params.alpha.denominator
    improver = np.zeros(len(tab.ids), dtype=np.int16)
    for v in range(n):
        s = p * tab.deg[v].astype(np.int64) + q * tab.dist[v].astype(np.int64)
        u = tab.unreach[v].astype(np.int64)
        if literal:
            s = s + (p * n**3 + q) * u
            better = s < s[gi]
        else:
            better = (u < u[gi]) | ((u == u[gi]) & (s < s[gi]))
        improver |= better.astype(np.int16) << v
    cand = np.nonzero(improver)[0]
    ids = tab.ids[cand]
    imp = improver[cand]
    added = ids & ~gi
    removed = gi & ~ids
    need = tab.endpoints[added]
    for size in range(1, min(k, n) + 1):
        for gamma_t in combinations(range(n), size):
            gamma = sum(1 << x for x in gamma_t)
            meet = tab.meeting(gamma)
            ok = ((imp & gamma) == gamma) & ((need & ~gamma) == 0) & ((removed & ~meet) == 0)
            ctr.count += len(cand)  # the table is exhaustive; no budget applies
            hits = np.nonzero(ok)[0]
            if len(hits) == 0:
                continue
            moves = sorted(
                (tab.edges_of(int(removed[h])), tab.edges_of(int(added[h]))) for h in hits
            )
            for R, A in moves:
                yield CoalitionChange(gamma_t, R, A)
