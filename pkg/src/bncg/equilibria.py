"""Improving-move search and stability checks for every solution concept.

All comparisons are exact.  With ``alpha = p/q`` an agent's cost is scaled by
``q`` and compared as the integer pair ``(unreachable, p*deg + q*dist)``;
the optional literal mode instead charges ``q*M`` per unreachable node with
``M = alpha*n**3 + 1`` and compares a single integer.

Moves are generated in canonical order (see ``sort_key`` on each move class),
so the first improving move found is the reported witness.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

from .game import ExtendedCost, GameParams, agent_cost
from .graph import Graph, _bits, _norm, bfs_profile
from .moves import (
    AddEdge,
    BuyEdge,
    CoalitionChange,
    MoveNotApplicable,
    NeighborhoodChange,
    RemoveEdge,
    StrategyChange,
    Swap,
    apply_move,
    move_to_dict,
)


class SearchBudgetExceeded(RuntimeError):
    """The configured enumeration budget was hit before the search finished."""


class AssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class Limits:
    """Search budgets.

    ``bne_center_cap`` bounds the pruned (R, A) space per centre,
    ``coalition_cap`` the number of coalition candidates evaluated per check,
    ``strategy_max_n`` the size up to which unilateral best responses are
    enumerated.  Up to ``table_max_n`` nodes coalition checks use the
    vectorised target-graph table instead of coalition enumeration.
    """

    move_cap: int = 10**8
    bne_center_cap: int = 2**24
    coalition_cap: int = 20_000_000
    strategy_max_n: int = 16
    table_max_n: int = 6
    literal_m: bool = False

    def __post_init__(self) -> None:
        for name in ("move_cap", "bne_center_cap", "coalition_cap", "strategy_max_n"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_LIMITS = Limits()


# -- concepts ---------------------------------------------------------------

_SIMPLE = ("re", "bae", "ps", "bswe", "bge", "bne", "bse", "uni-add", "uni-re", "uni-ne")
_DISPLAY = {
    "re": "RE",
    "bae": "BAE",
    "ps": "PS",
    "bswe": "BSwE",
    "bge": "BGE",
    "bne": "BNE",
    "bse": "BSE",
    "uni-add": "uni-add",
    "uni-re": "uni-re",
    "uni-ne": "uni-ne",
}


@dataclass(frozen=True)
class Concept:
    kind: str
    k: int | None = None

    def __str__(self) -> str:
        return f"kbse:{self.k}" if self.kind == "kbse" else self.kind

    @property
    def label(self) -> str:
        return f"{self.k}-BSE" if self.kind == "kbse" else _DISPLAY[self.kind]


def parse_concept(text: str | Concept) -> Concept:
    if isinstance(text, Concept):
        return text
    s = text.strip().lower()
    m = re.fullmatch(r"(?:kbse[:(]\s*(\d+)\)?|(\d+)-bse)", s)
    if m:
        k = int(m.group(1) or m.group(2))
        if k < 1:
            raise ValueError("coalition size must be at least 1")
        return Concept("kbse", k)
    s = {"unilateral-add": "uni-add", "unilateral-re": "uni-re", "unilateral-ne": "uni-ne"}.get(s, s)
    if s not in _SIMPLE:
        raise ValueError(f"unknown concept {text!r}")
    return Concept(s)


# -- reports ----------------------------------------------------------------


@dataclass
class StabilityReport:
    concept: str
    stable: bool
    witness: object | None = None
    moves_examined: int = 0
    budget_exhausted: bool = False
    engine: str = field(default="", compare=False)

    @property
    def status(self) -> str:
        """``"S"``, ``"U"`` or ``"B"`` (undecided within budget)."""
        if self.stable:
            return "S"
        return "U" if self.witness is not None else "B"

    def to_dict(self) -> dict:
        return {
            "concept": self.concept,
            "stable": self.stable,
            "status": {"S": "stable", "U": "unstable", "B": "budget"}[self.status],
            "witness": None if self.witness is None else move_to_dict(self.witness),
            "moves_examined": self.moves_examined,
            "budget_exhausted": self.budget_exhausted,
        }


# -- cost evaluation --------------------------------------------------------


class _Counter:
    def __init__(self, cap: int):
        self.count = 0
        self.cap = cap

    def tick(self, k: int = 1) -> None:
        self.count += k
        if self.count > self.cap:
            raise SearchBudgetExceeded(f"more than {self.cap} candidate moves")


class _Evaluator:
    """Integer-scaled cost keys for one (n, alpha, mode) combination."""

    def __init__(self, n: int, params: GameParams, literal: bool):
        a = params.alpha
        self.n = n
        self.p, self.q = a.numerator, a.denominator
        self.literal = literal
        self.mq = self.p * n**3 + self.q  # q * M

    def key(self, adj, u: int, buy: int | None = None) -> tuple[int, int]:
        unreach, dist = bfs_profile(adj, u)
        if buy is None:
            buy = adj[u].bit_count()
        s = self.p * buy + self.q * dist
        if self.literal:
            return (0, s + self.mq * unreach)
        return (unreach, s)

    def connected_floor(self, deg: int) -> int:
        """Scaled cost lower bound for a node of degree ``deg`` in a connected graph."""
        return self.p * deg + self.q * (2 * (self.n - 1) - deg)

    def may_improve(self, deg_after: int, cur: tuple[int, int], cur_unreach: int) -> bool:
        if cur_unreach:
            return True
        if deg_after == 0 and self.n > 1:
            return False
        return self.connected_floor(deg_after) < cur[1]


def _toggle(adj: list[int], u: int, v: int) -> None:
    adj[u] ^= 1 << v
    adj[v] ^= 1 << u


def lex_subsets(items: tuple) -> Iterator[tuple]:
    """All subsets of ``items`` (sorted) as tuples in lexicographic order."""
    yield ()
    for i, x in enumerate(items):
        for rest in lex_subsets(items[i + 1 :]):
            yield (x,) + rest


# -- move generators --------------------------------------------------------


def _re_moves(g: Graph, ev: _Evaluator, ctr: _Counter):
    adj0 = list(g.adjacency)
    for u in range(g.n):
        cur = ev.key(adj0, u)
        for v in _bits(adj0[u]):
            ctr.tick()
            adj = adj0.copy()
            _toggle(adj, u, v)
            if ev.key(adj, u) < cur:
                yield RemoveEdge(u, v)


def _bae_moves(g: Graph, ev: _Evaluator, ctr: _Counter):
    adj0 = list(g.adjacency)
    cur = [ev.key(adj0, u) for u in range(g.n)]
    for u, v in g.non_edges():
        ctr.tick()
        adj = adj0.copy()
        _toggle(adj, u, v)
        if ev.key(adj, u) < cur[u] and ev.key(adj, v) < cur[v]:
            yield AddEdge(u, v)


def _bswe_moves(g: Graph, ev: _Evaluator, ctr: _Counter):
    adj0 = list(g.adjacency)
    n = g.n
    prof = [bfs_profile(adj0, u) for u in range(n)]
    cur = [ev.key(adj0, u) for u in range(n)]
    hopeful = [ev.may_improve(adj0[w].bit_count() + 1, cur[w], prof[w][0]) for w in range(n)]
    for u in range(n):
        for v in _bits(adj0[u]):
            for w in range(n):
                if w == u or (adj0[u] >> w) & 1:
                    continue
                ctr.tick()
                if not hopeful[w]:
                    continue
                adj = adj0.copy()
                _toggle(adj, u, v)
                _toggle(adj, u, w)
                if ev.key(adj, u) < cur[u] and ev.key(adj, w) < cur[w]:
                    yield Swap(u, v, w)


def _bne_moves(g: Graph, ev: _Evaluator, ctr: _Counter, limits: Limits):
    adj0 = list(g.adjacency)
    n = g.n
    prof = [bfs_profile(adj0, u) for u in range(n)]
    cur = [ev.key(adj0, u) for u in range(n)]
    for u in range(n):
        nbrs = tuple(_bits(adj0[u]))
        # a new partner pays alpha for one more edge; drop those who never gain
        partners = tuple(
            a
            for a in range(n)
            if a != u
            and not (adj0[u] >> a) & 1
            and ev.may_improve(adj0[a].bit_count() + 1, cur[a], prof[a][0])
        )
        space = (1 << (len(nbrs) + len(partners))) - 1
        if space > limits.bne_center_cap:
            raise SearchBudgetExceeded(
                f"neighbourhood search at centre {u} needs {space} candidates "
                f"(cap {limits.bne_center_cap})"
            )
        deg = len(nbrs)
        for R in lex_subsets(nbrs):
            for A in lex_subsets(partners):
                if not R and not A:
                    continue
                ctr.tick()
                if not ev.may_improve(deg - len(R) + len(A), cur[u], prof[u][0]):
                    continue
                adj = adj0.copy()
                for x in R:
                    _toggle(adj, u, x)
                for x in A:
                    _toggle(adj, u, x)
                if ev.key(adj, u) >= cur[u]:
                    continue
                if all(ev.key(adj, a) < cur[a] for a in A):
                    yield NeighborhoodChange(u, R, A)


def _coalition_moves(g: Graph, ev: _Evaluator, k: int, ctr: _Counter):
    """Enumerate coalitions by (size, members), then (R, A) lexicographically."""
    adj0 = list(g.adjacency)
    n = g.n
    prof = [bfs_profile(adj0, u) for u in range(n)]
    cur = [ev.key(adj0, u) for u in range(n)]
    deg0 = [a.bit_count() for a in adj0]
    edges = g.sorted_edges()
    for size in range(1, min(k, n) + 1):
        for gamma in combinations(range(n), size):
            gset = set(gamma)
            r_cand = tuple(e for e in edges if e[0] in gset or e[1] in gset)
            a_cand = tuple((u, v) for u, v in combinations(gamma, 2) if not (adj0[u] >> v) & 1)
            for R in lex_subsets(r_cand):
                deg_r = {x: deg0[x] for x in gamma}
                for a, b in R:
                    if a in deg_r:
                        deg_r[a] -= 1
                    if b in deg_r:
                        deg_r[b] -= 1
                adj_r = adj0.copy()
                for a, b in R:
                    _toggle(adj_r, a, b)
                for A in lex_subsets(a_cand):
                    if not R and not A:
                        continue
                    ctr.tick()
                    deg = dict(deg_r)
                    for a, b in A:
                        deg[a] += 1
                        deg[b] += 1
                    if not all(ev.may_improve(deg[x], cur[x], prof[x][0]) for x in gamma):
                        continue
                    adj = adj_r.copy()
                    for a, b in A:
                        _toggle(adj, a, b)
                    if all(ev.key(adj, x) < cur[x] for x in gamma):
                        yield CoalitionChange(gamma, R, A)


def _coalition_table_moves(g: Graph, params: GameParams, k: int, limits: Limits, ctr: _Counter):
    from ._table import coalition_moves_table

    yield from coalition_moves_table(g, params, k, limits.literal_m, ctr)


def _uses_table(g: Graph, limits: Limits) -> bool:
    return 2 <= g.n <= limits.table_max_n


def improving_moves(
    concept: str | Concept,
    g: Graph,
    params: GameParams,
    limits: Limits = DEFAULT_LIMITS,
    *,
    engine: str = "auto",
    _counter: _Counter | None = None,
) -> Iterator:
    """Stream every improving move of the concept's shape in canonical order.

    Supported concepts: RE, BAE, BSwE, BNE and k-BSE (and BSE as n-BSE).
    ``engine`` selects the k-BSE search: ``"coalition"`` enumerates coalitions
    directly, ``"table"`` scans a precomputed table of all target graphs,
    ``"auto"`` uses the table for small n.
    """
    c = parse_concept(concept)
    ctr = _counter or _Counter(limits.move_cap)
    ev = _Evaluator(g.n, params, limits.literal_m)
    if c.kind == "re":
        return _re_moves(g, ev, ctr)
    if c.kind == "bae":
        return _bae_moves(g, ev, ctr)
    if c.kind == "bswe":
        return _bswe_moves(g, ev, ctr)
    if c.kind == "bne":
        return _bne_moves(g, ev, ctr, limits)
    if c.kind in ("kbse", "bse"):
        k = g.n if c.kind == "bse" else min(c.k, g.n)
        if _counter is None:
            ctr.cap = limits.coalition_cap
        if engine == "table" or (engine == "auto" and _uses_table(g, limits)):
            return _coalition_table_moves(g, params, k, limits, ctr)
        if engine not in ("auto", "coalition"):
            raise ValueError(f"unknown engine {engine!r}")
        return _coalition_moves(g, ev, k, ctr)
    raise ValueError(f"{c} has no single move stream; use check_stability")


_COMPONENTS = {
    "ps": ("re", "bae"),
    "bge": ("re", "bae", "bswe"),
}


def check_stability(
    concept: str | Concept,
    g: Graph,
    params: GameParams,
    limits: Limits = DEFAULT_LIMITS,
    *,
    assignment: "EdgeAssignment | None" = None,
    engine: str = "auto",
) -> StabilityReport:
    """Decide membership; the witness is the canonically first improving move.

    Composite concepts run their components in shape order.  If a component
    exhausts its budget the report is undecided unless a later component
    still finds a witness.
    """
    c = parse_concept(concept)
    if c.kind == "uni-add":
        return check_unilateral_add(g, params, limits)
    if c.kind in ("uni-re", "uni-ne"):
        if assignment is None:
            raise AssignmentError(f"{c} needs an edge assignment")
        if c.kind == "uni-re":
            return check_unilateral_remove(g, assignment, params, limits)
        return check_unilateral_ne(g, assignment, params, limits)
    parts = _COMPONENTS.get(c.kind, (str(c),))
    total = 0
    exhausted = False
    for part in parts:
        ctr = _Counter(limits.move_cap)
        try:
            stream = improving_moves(part, g, params, limits, engine=engine, _counter=ctr)
            if parse_concept(part).kind in ("kbse", "bse"):
                ctr.cap = limits.coalition_cap
            witness = next(stream, None)
        except SearchBudgetExceeded:
            exhausted = True
            total += ctr.count
            continue
        total += ctr.count
        if witness is not None:
            return StabilityReport(c.label, False, witness, total, exhausted, engine)
    return StabilityReport(c.label, not exhausted, None, total, exhausted, engine)


# -- unilateral game --------------------------------------------------------


class EdgeAssignment:
    """Which endpoint bought each edge in the unilateral game."""

    def __init__(self, g: Graph, owner: dict[tuple[int, int], int]):
        norm = {}
        for e, o in owner.items():
            e = _norm(*e)
            if o not in e:
                raise AssignmentError(f"owner {o} is not an endpoint of {e}")
            norm[e] = o
        if set(norm) != set(g.edges):
            raise AssignmentError("assignment must cover exactly the edges of the graph")
        self.graph = g
        self.owner = norm

    def owned_by(self, u: int) -> list[int]:
        return sorted(b if a == u else a for (a, b), o in self.owner.items() if o == u)

    def __repr__(self) -> str:
        return f"EdgeAssignment({dict(sorted(self.owner.items()))})"


def all_edge_assignments(g: Graph) -> Iterator[EdgeAssignment]:
    """All ``2**m`` assignments; bit i set means edge i belongs to its larger end."""
    edges = g.sorted_edges()
    for mask in range(1 << len(edges)):
        yield EdgeAssignment(g, {e: e[(mask >> i) & 1] for i, e in enumerate(edges)})


def check_unilateral_add(g: Graph, params: GameParams, limits: Limits = DEFAULT_LIMITS) -> StabilityReport:
    """A single agent buying one edge alone; the buyer alone pays alpha."""
    ev = _Evaluator(g.n, params, limits.literal_m)
    ctr = _Counter(limits.move_cap)
    adj0 = list(g.adjacency)
    for u in range(g.n):
        cur = ev.key(adj0, u)
        for v in range(g.n):
            if v == u or (adj0[u] >> v) & 1:
                continue
            ctr.tick()
            adj = adj0.copy()
            _toggle(adj, u, v)
            if ev.key(adj, u) < cur:
                return StabilityReport("uni-add", False, BuyEdge(u, v), ctr.count)
    return StabilityReport("uni-add", True, None, ctr.count)


def check_unilateral_remove(
    g: Graph, f: EdgeAssignment, params: GameParams, limits: Limits = DEFAULT_LIMITS
) -> StabilityReport:
    """Only the owner of an edge may delete it, saving alpha."""
    ev = _Evaluator(g.n, params, limits.literal_m)
    ctr = _Counter(limits.move_cap)
    adj0 = list(g.adjacency)
    for u in range(g.n):
        cur = ev.key(adj0, u)
        for v in f.owned_by(u):
            ctr.tick()
            adj = adj0.copy()
            _toggle(adj, u, v)
            if ev.key(adj, u) < cur:
                return StabilityReport("uni-re", False, RemoveEdge(u, v), ctr.count)
    return StabilityReport("uni-re", True, None, ctr.count)


def apply_strategy(g: Graph, f: EdgeAssignment, move: StrategyChange) -> Graph:
    """Graph after ``move.agent`` replaces its own purchases by ``move.strategy``."""
    u = move.agent
    if not 0 <= u < g.n or any(not 0 <= s < g.n or s == u for s in move.strategy):
        raise MoveNotApplicable("strategy mentions an invalid node")
    kept = {e for e, o in f.owner.items() if o != u}
    return Graph(g.n, frozenset(kept | {_norm(u, s) for s in move.strategy}))


def unilateral_cost(g: Graph, f: EdgeAssignment, params: GameParams, u: int) -> ExtendedCost:
    unreach, dist = bfs_profile(g.adjacency, u)
    return ExtendedCost(unreach, params.alpha * len(f.owned_by(u)) + dist)


def check_unilateral_ne(
    g: Graph, f: EdgeAssignment, params: GameParams, limits: Limits = DEFAULT_LIMITS
) -> StabilityReport:
    """Best-response check over all ``2**(n-1)`` strategies of every agent.

    Edges bought by others persist whatever the agent does; buying an edge
    that already exists costs alpha and changes no distance.
    """
    n = g.n
    if n > limits.strategy_max_n:
        raise SearchBudgetExceeded(f"n={n} exceeds the strategy enumeration cap {limits.strategy_max_n}")
    ev = _Evaluator(n, params, limits.literal_m)
    ctr = _Counter(limits.move_cap)
    adj0 = list(g.adjacency)
    for u in range(n):
        owned = tuple(f.owned_by(u))
        cur = ev.key(adj0, u, buy=len(owned))
        base = adj0.copy()
        for x in owned:
            _toggle(base, u, x)
        others = tuple(x for x in range(n) if x != u)
        for S in lex_subsets(others):
            if S == owned:
                continue
            ctr.tick()
            adj = base.copy()
            for s in S:
                adj[u] |= 1 << s
                adj[s] |= 1 << u
            if ev.key(adj, u, buy=len(S)) < cur:
                return StabilityReport("uni-ne", False, StrategyChange(u, S), ctr.count)
    return StabilityReport("uni-ne", True, None, ctr.count)


# -- independent re-verification --------------------------------------------

_SHAPES = {
    "re": RemoveEdge,
    "bae": AddEdge,
    "bswe": Swap,
    "bne": NeighborhoodChange,
    "kbse": CoalitionChange,
    "bse": CoalitionChange,
    "uni-add": BuyEdge,
    "uni-re": RemoveEdge,
    "uni-ne": StrategyChange,
}
_SHAPES["ps"] = (RemoveEdge, AddEdge)
_SHAPES["bge"] = (RemoveEdge, AddEdge, Swap)


def verify_witness(
    concept: str | Concept,
    g: Graph,
    params: GameParams,
    move,
    assignment: EdgeAssignment | None = None,
) -> bool:
    """Re-check a witness with plain exact costs, independent of the search.

    True iff the move has a shape allowed by the concept, applies to ``g``,
    and strictly lowers the cost of every consulted agent.
    """
    c = parse_concept(concept)
    if not isinstance(move, _SHAPES[c.kind]):
        return False
    if isinstance(move, CoalitionChange) and c.kind == "kbse" and len(move.coalition) > c.k:
        return False
    try:
        if c.kind == "uni-ne":
            if assignment is None:
                raise AssignmentError("uni-ne witnesses need an edge assignment")
            h = apply_strategy(g, assignment, move)
            before = unilateral_cost(g, assignment, params, move.agent)
            unreach, dist = bfs_profile(h.adjacency, move.agent)
            after = ExtendedCost(unreach, params.alpha * len(move.strategy) + dist)
            return after < before
        if c.kind == "uni-re":
            if assignment is None or assignment.owner.get(_norm(move.agent, move.partner)) != move.agent:
                return False
        if isinstance(move, RemoveEdge) and not g.has_edge(move.agent, move.partner):
            return False
        if isinstance(move, Swap) and not g.has_edge(move.u, move.v):
            return False
        h = apply_move(g, move)
    except MoveNotApplicable:
        return False
    return all(agent_cost(h, params, x) < agent_cost(g, params, x) for x in move.consulted())


def classify(
    g: Graph,
    params: GameParams,
    concepts: Iterable[str | Concept],
    limits: Limits = DEFAULT_LIMITS,
) -> dict[str, StabilityReport]:
    return {str(parse_concept(c)): check_stability(c, g, params, limits) for c in concepts}
