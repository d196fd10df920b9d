"""Named graph families with exact metadata and sufficient stability conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .graph import Graph

FAMILIES = (
    "star",
    "path",
    "cycle",
    "clique",
    "complete_dary",
    "almost_complete_dary",
    "stretched_binary",
    "stretched_tree_star",
)


class ConstructionError(ValueError):
    """Parameters violate the family's constraints."""


@dataclass(frozen=True)
class ConstructionSpec:
    family: str
    n: int | None = None
    d: int | None = None
    k: int | None = None
    t: Fraction | None = None
    eta: int | None = None
    arity: int | None = None

    def __post_init__(self) -> None:
        fam = self.family.replace("-", "_")
        if fam not in FAMILIES:
            raise ConstructionError(f"unknown family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if self.t is not None:
            object.__setattr__(self, "t", Fraction(self.t))


@dataclass(frozen=True)
class ConstructionResult:
    family: str
    graph: Graph
    root: int
    metadata: dict = field(default_factory=dict)


def _need(spec: ConstructionSpec, *names: str) -> None:
    for name in names:
        if getattr(spec, name) is None:
            raise ConstructionError(f"{spec.family} needs parameter {name}")


def _positive(name: str, value: int, low: int = 1) -> None:
    if value < low:
        raise ConstructionError(f"{name} must be at least {low}, got {value}")


def star(n: int) -> Graph:
    _positive("n", n)
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def path(n: int) -> Graph:
    _positive("n", n)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _positive("n", n, 3)
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def clique(n: int) -> Graph:
    _positive("n", n)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def almost_complete_dary(arity: int, n: int) -> Graph:
    """d-ary tree on n nodes filled in BFS order, leftmost first."""
    _positive("arity", arity, 2)
    _positive("n", n)
    return Graph.from_edges(n, [((v - 1) // arity, v) for v in range(1, n)])


def complete_dary(arity: int, depth: int) -> Graph:
    _positive("arity", arity, 2)
    _positive("depth", depth, 0)
    n = (arity ** (depth + 1) - 1) // (arity - 1)
    return almost_complete_dary(arity, n)


def stretched_binary_size(d: int, k: int) -> int:
    return (2 ** (d + 1) - 2) * k + 1


def _stretched_binary(d: int, k: int, offset: int = 0):
    """Edges and branch-node labels of a k-stretched complete binary tree.

    Binary-tree nodes are visited in BFS order; the k-1 inner path nodes of
    each edge are labelled from parent towards child, the child last.
    """
    branch = [offset]
    edges = []
    nxt = offset + 1
    for b in range(2**d - 1):  # internal binary nodes in BFS order
        for _ in range(2):
            prev = branch[b]
            for _ in range(k):
                edges.append((prev, nxt))
                prev = nxt
                nxt += 1
            branch.append(prev)
    return edges, branch, nxt - offset


def stretched_binary(d: int, k: int) -> ConstructionResult:
    _positive("d", d)
    _positive("k", k)
    edges, branch, size = _stretched_binary(d, k)
    g = Graph.from_edges(size, edges)
    assert size == stretched_binary_size(d, k)
    return ConstructionResult(
        "stretched_binary",
        g,
        0,
        {"n": size, "d": d, "k": k, "depth": k * d, "branch_nodes": branch},
    )


def stretched_tree_star(k: int, t, eta: int) -> ConstructionResult:
    """Root 0 with ceil((eta-1)/|T|) copies of the largest k-stretched tree with |T| <= t."""
    _positive("k", k)
    t = Fraction(t)
    if t < 2 * k + 1:
        raise ConstructionError(f"need t >= 2k+1 = {2 * k + 1}, got t={t}")
    if eta < 2 * t + 1:
        raise ConstructionError(f"need eta >= 2t+1 = {2 * t + 1}, got eta={eta}")
    d = 1
    while stretched_binary_size(d + 1, k) <= t:
        d += 1
    size = stretched_binary_size(d, k)
    copies = -(-(eta - 1) // size)
    edges = []
    roots = []
    for c in range(copies):
        offset = 1 + c * size
        e, _, _ = _stretched_binary(d, k, offset)
        edges.extend(e)
        edges.append((0, offset))
        roots.append(offset)
    n = 1 + copies * size
    return ConstructionResult(
        "stretched_tree_star",
        Graph.from_edges(n, edges),
        0,
        {
            "n": n,
            "d": d,
            "k": k,
            "t": t,
            "eta": eta,
            "subtree_size": size,
            "copies": copies,
            "copy_roots": roots,
            "depth": k * d + 1,
            "subtree_depth": k * d,
        },
    )


def construct(spec: ConstructionSpec) -> ConstructionResult:
    fam = spec.family
    if fam in ("star", "path", "cycle", "clique"):
        _need(spec, "n")
        g = {"star": star, "path": path, "cycle": cycle, "clique": clique}[fam](spec.n)
        depth = {"star": min(1, spec.n - 1), "path": spec.n - 1}.get(fam)
        meta = {"n": spec.n}
        if depth is not None:
            meta["depth"] = depth
        return ConstructionResult(fam, g, 0, meta)
    if fam == "almost_complete_dary":
        _need(spec, "arity", "n")
        g = almost_complete_dary(spec.arity, spec.n)
        depth = 0
        v = spec.n - 1
        while v > 0:
            v = (v - 1) // spec.arity
            depth += 1
        return ConstructionResult(fam, g, 0, {"n": spec.n, "arity": spec.arity, "depth": depth})
    if fam == "complete_dary":
        _need(spec, "arity", "d")
        g = complete_dary(spec.arity, spec.d)
        return ConstructionResult(fam, g, 0, {"n": g.n, "arity": spec.arity, "depth": spec.d})
    if fam == "stretched_binary":
        _need(spec, "d", "k")
        return stretched_binary(spec.d, spec.k)
    _need(spec, "k", "t", "eta")
    return stretched_tree_star(spec.k, spec.t, spec.eta)


# -- parameter ranges -------------------------------------------------------


def cycle_bse_alpha_range(n: int) -> tuple[Fraction, Fraction]:
    """Open interval of edge prices for which the cycle is claimed strongly stable.

    Even n: (n^2/4 - (n-1), n(n-2)/4).  Odd n: ((n+1)(n-1)/4 - (n-1), (n+1)(n-1)/4).
    For odd n the upper end exceeds the largest price at which no single
    edge removal pays off, which is (n-1)^2/4; see ``cycle_remove_limit``.
    """
    if n < 3:
        raise ValueError("cycles need n >= 3")
    if n % 2 == 0:
        return Fraction(n * n, 4) - (n - 1), Fraction(n * (n - 2), 4)
    return Fraction((n + 1) * (n - 1), 4) - (n - 1), Fraction((n + 1) * (n - 1), 4)


def cycle_remove_limit(n: int) -> Fraction:
    """Distance increase of an endpoint when one cycle edge is deleted."""
    if n < 3:
        raise ValueError("cycles need n >= 3")
    h = n // 2
    before = 2 * sum(range(1, h + 1)) - (h if n % 2 == 0 else 0)
    after = n * (n - 1) // 2
    return Fraction(after - before)


@dataclass(frozen=True)
class SufficientCondition:
    concept: str
    description: str
    predicate: Callable[[Fraction], bool] = field(compare=False)
    threshold: Fraction | None = None

    def holds(self, alpha) -> bool:
        return bool(self.predicate(Fraction(alpha)))


_ALL = ("re", "bae", "ps", "bswe", "bge", "bne", "bse")


def stability_sufficient_alpha(result: ConstructionResult) -> list[SufficientCondition]:
    """Conditions on alpha under which the construction is guaranteed stable."""
    meta = result.metadata
    fam = result.family
    n = result.graph.n
    if fam == "star":
        return [
            SufficientCondition(c, "alpha >= 1", lambda a: a >= 1, Fraction(1)) for c in _ALL
        ]
    if fam == "clique":
        return [
            SufficientCondition(c, "alpha < 1", lambda a: a < 1) for c in _ALL
        ]
    if fam == "cycle":
        lo, hi = cycle_bse_alpha_range(n)
        cap = min(hi, cycle_remove_limit(n))
        return [
            SufficientCondition(
                "bse",
                f"{lo} < alpha < {cap}",
                lambda a, lo=lo, cap=cap: lo < a < cap,
            )
        ]
    if fam == "stretched_binary":
        k = meta["k"]
        return [
            SufficientCondition("re", "any alpha (tree)", lambda a: True, Fraction(0)),
            SufficientCondition("bae", f"alpha >= 5kn = {5 * k * n}", lambda a: a >= 5 * k * n, Fraction(5 * k * n)),
            SufficientCondition("bswe", f"alpha >= 7kn = {7 * k * n}", lambda a: a >= 7 * k * n, Fraction(7 * k * n)),
            SufficientCondition("bge", f"alpha >= 7kn = {7 * k * n}", lambda a: a >= 7 * k * n, Fraction(7 * k * n)),
        ]
    if fam == "stretched_tree_star":
        k, size, depth = meta["k"], meta["subtree_size"], meta["depth"]

        def bne(a: Fraction) -> bool:
            if not (k == 1 or a >= 6 * k * n):
                return False
            return Fraction(3 * n * depth) / a + 1 <= a / (3 * size * depth)

        out = [
            SufficientCondition("re", "any alpha (tree)", lambda a: True, Fraction(0)),
            SufficientCondition(
                "bne",
                "(k = 1 or alpha >= 6kn) and 3n*depth/alpha + 1 <= alpha/(3|T|*depth)",
                bne,
            ),
        ]
        if k == 1:
            bound = 7 * (2 * size + 1)
            out.append(
                SufficientCondition("bge", f"alpha >= 7(2|T|+1) = {bound}", lambda a: a >= bound, Fraction(bound))
            )
        return out
    raise ValueError(f"no sufficient stability conditions known for family {fam!r}")


def stretched_tree_log_bounds(t: float, k: int) -> tuple[float, float]:
    """Lower and upper depth bounds k*log2(t/(6k)) and k*log2(t) of the inner tree."""
    return k * math.log2(t / (6 * k)), k * math.log2(t)
