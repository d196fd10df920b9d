"""Closed-form bound evaluators and per-graph lemma verifiers.

Graph-measured quantities are exact rationals.  Logarithms are base 2; a
logarithm is exact when its argument is a power of two and a float
otherwise.  An inequality with a float side holds only with a margin of
``FLOAT_SLACK``; anything closer is reported as a failure, not rounded away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .enumeration import fingerprint
from .equilibria import DEFAULT_LIMITS, Limits, check_stability
from .game import GameParams, agent_cost, parse_alpha, poa, social_cost
from .graph import (
    Graph,
    bfs_profile,
    induced_subgraph,
    is_connected,
    is_tree,
    one_medians,
    tree_view,
)

FLOAT_SLACK = 1e-9

Number = Union[Fraction, int, float]


class BoundDomainError(ValueError):
    """Parameters outside the domain of a bound formula."""


class PreconditionError(ValueError):
    """A lemma's premise does not hold for the given graph."""


def log2(x) -> Number:
    """Base-2 logarithm; exact Fraction for powers of two."""
    x = Fraction(x)
    if x <= 0:
        raise BoundDomainError(f"log of non-positive value {x}")
    num, den = x.numerator, x.denominator
    if num & (num - 1) == 0 and den & (den - 1) == 0:
        return Fraction(num.bit_length() - den.bit_length())
    return math.log2(num) - math.log2(den)


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


def leq(lhs: Number, rhs: Number) -> bool:
    if _is_exact(lhs) and _is_exact(rhs):
        return lhs <= rhs
    return float(lhs) + FLOAT_SLACK <= float(rhs)


def _slack(lhs: Number, rhs: Number) -> Number:
    if _is_exact(lhs) and _is_exact(rhs):
        return Fraction(rhs) - Fraction(lhs)
    return float(rhs) - float(lhs)


# -- bound formulas ---------------------------------------------------------


def _alpha(params: dict) -> Fraction:
    return parse_alpha(params["alpha"])


def _eps(params: dict) -> Fraction:
    e = Fraction(params["epsilon"])
    if not 0 < e <= 1:
        raise BoundDomainError("epsilon must lie in (0, 1]")
    return e


def _n(params: dict, low: int = 1) -> int:
    n = int(params["n"])
    if n < low:
        raise BoundDomainError(f"n must be at least {low}")
    return n


def _poa_node_bound(p):
    a, n = _alpha(p), _n(p, 2)
    return (a + Fraction(p["dist_u"])) / (a + n - 1)


def _social_cost_node_bound(p):
    a, n = _alpha(p), _n(p)
    return 2 * (n - 1) * (a + Fraction(p["dist_u"]))


def _trivial_poa(p):
    a, n = _alpha(p), _n(p)
    return 1 + Fraction(n * n) / a


def _swap_poa_upper(p):
    return 2 + 2 * log2(_alpha(p))


def _bge_poa_lower(p):
    return Fraction(1, 4) * log2(_alpha(p)) - Fraction(17, 8)


def _star_poa_lower(p):
    a, n = _alpha(p), _n(p)
    k, t = int(p["k"]), Fraction(p["t"])
    if k < 1 or t <= 0:
        raise BoundDomainError("need k >= 1 and t > 0")
    return n * k * (log2(t / k) - Fraction(9, 2)) / (2 * (a + n - 1))


def _bne_lower_i(p):
    return _eps(p) / 168 * log2(_alpha(p)) - Fraction(3, 28)


def _bne_lower_ii(p):
    return _eps(p) / 4 * log2(_alpha(p)) - Fraction(9, 8)


def _bne_small_alpha_upper(p):
    a, n = _alpha(p), _n(p)
    if n <= 15:
        raise BoundDomainError("the constant bound needs n > 15")
    if a * a > n:
        raise BoundDomainError("the constant bound needs alpha <= sqrt(n)")
    return Fraction(4)


def _three_bse_upper(p):
    return Fraction(25)


def _worst_node_bound(p):
    a, n = _alpha(p), _n(p, 2)
    return Fraction(p["cost_u"]) / (a + n - 1)


def _dary_cost_bound(p):
    a, n = _alpha(p), _n(p)
    d = int(p["d"])
    if d < 2:
        raise BoundDomainError("arity must be at least 2")
    if n == 1:
        return (d + 1) * a
    return float((d + 1) * a) + 2 * (n - 1) * math.log(n, d)


def _bse_large_alpha(p):
    a, n = _alpha(p), _n(p, 2)
    if float(a) < n * math.log2(n):
        raise BoundDomainError("the constant bound needs alpha >= n log n")
    return Fraction(5)


def _bse_small_alpha(p):
    a, n = _alpha(p), _n(p, 2)
    e = Fraction(p["epsilon"])
    if e <= 0:
        raise BoundDomainError("epsilon must be positive")
    if math.log2(float(a)) > (1 - float(e)) * math.log2(n) + FLOAT_SLACK:
        raise BoundDomainError("the bound needs alpha <= n^(1-epsilon)")
    return 3 + 2 / e


def _bse_general(p):
    n = _n(p)
    if n <= 4:
        raise BoundDomainError("log log log n is undefined or zero for n <= 4")
    lg = math.log2(n)
    return 2 + math.log2(lg) + 2 * lg / math.log2(math.log2(lg))


def reachability_constant(p) -> Fraction:
    """``sum_{i=0}^{4p} (2p)^i`` with 4p rounded up to an integer."""
    p = Fraction(p)
    if p < Fraction(1, 2):
        raise BoundDomainError("p must be at least 1/2")
    steps = math.ceil(4 * p)
    p = Fraction(steps, 4)
    return sum((2 * p) ** i for i in range(steps + 1))


def reachability_limit(p) -> int:
    """Smallest n with n/2 > reachability_constant(p).

    Beyond this size no graph at alpha = n keeps every agent's cost within a
    factor p of alpha + n - 1.
    """
    k = reachability_constant(p)
    return math.floor(2 * k) + 1


def _reachability_limit(p):
    return reachability_limit(p["p"])


BOUNDS = {
    "poa_node_bound": _poa_node_bound,
    "social_cost_node_bound": _social_cost_node_bound,
    "trivial_poa": _trivial_poa,
    "swap_poa_upper": _swap_poa_upper,
    "bge_poa_lower": _bge_poa_lower,
    "star_poa_lower": _star_poa_lower,
    "bne_lower_i": _bne_lower_i,
    "bne_lower_ii": _bne_lower_ii,
    "bne_small_alpha_upper": _bne_small_alpha_upper,
    "three_bse_upper": _three_bse_upper,
    "worst_node_bound": _worst_node_bound,
    "dary_cost_bound": _dary_cost_bound,
    "bse_large_alpha": _bse_large_alpha,
    "bse_small_alpha": _bse_small_alpha,
    "bse_general": _bse_general,
    "reachability_limit": _reachability_limit,
}


def evaluate_bound(bound_id: str, **params) -> Number:
    try:
        fn = BOUNDS[bound_id]
    except KeyError:
        raise ValueError(f"unknown bound {bound_id!r}") from None
    try:
        return fn(params)
    except KeyError as exc:
        raise BoundDomainError(f"{bound_id} needs parameter {exc.args[0]}") from None


# -- lemma reports ----------------------------------------------------------


@dataclass(frozen=True)
class LemmaRow:
    lemma: str
    subject: str
    lhs: Number
    rhs: Number
    holds: bool

    @property
    def slack(self) -> Number:
        return _slack(self.lhs, self.rhs)


@dataclass
class LemmaReport:
    lemma: str
    fingerprint: str
    rows: list[LemmaRow] = field(default_factory=list)
    skipped: str | None = None

    @property
    def all_hold(self) -> bool:
        return self.skipped is None and all(r.holds for r in self.rows)

    @property
    def worst_slack(self) -> Number | None:
        if not self.rows:
            return None
        return min((r.slack for r in self.rows), key=float)

    def add(self, lemma: str, subject: str, lhs: Number, rhs: Number) -> None:
        self.rows.append(LemmaRow(lemma, subject, lhs, rhs, leq(lhs, rhs)))


def _require_stable(concept, g, params, limits) -> None:
    rep = check_stability(concept, g, params, limits)
    if not rep.stable:
        why = "undecided within budget" if rep.budget_exhausted else f"witness {rep.witness}"
        raise PreconditionError(f"graph is not {rep.concept}-stable ({why})")


def verify_re_poa_bound(g: Graph, params: GameParams, limits: Limits = DEFAULT_LIMITS) -> LemmaReport:
    """Per node u: PoA <= (alpha+Dist(u))/(alpha+n-1) and cost <= 2(n-1)(alpha+Dist(u))."""
    if g.n < 2 or not is_connected(g):
        raise PreconditionError("needs a connected graph with n >= 2")
    if params.alpha < 1:
        raise PreconditionError("needs alpha >= 1")
    _require_stable("re", g, params, limits)
    a, n = params.alpha, g.n
    rep = LemmaReport("re_poa_bound", fingerprint(g))
    ratio = poa(g, params)
    total = social_cost(g, params).finite
    for u in range(n):
        dist = bfs_profile(g.adjacency, u)[1]
        rep.add("node_poa", f"u={u}", ratio, evaluate_bound("poa_node_bound", alpha=a, n=n, dist_u=dist))
        rep.add(
            "node_social_cost",
            f"u={u}",
            total,
            evaluate_bound("social_cost_node_bound", alpha=a, n=n, dist_u=dist),
        )
    return rep


def _subtree_median(g: Graph, view, u: int) -> int:
    """1-median of the subtree at u; the one closer to u if there are two."""
    sub, labels = induced_subgraph(g, view.subtree(u))
    medians = [labels[m] for m in one_medians(sub)]
    return min(medians, key=lambda v: (view.layer[v], v))


def root_median(g: Graph) -> int:
    return one_medians(g)[0]


def verify_swap_tree_lemmas(g: Graph, params: GameParams, limits: Limits = DEFAULT_LIMITS) -> LemmaReport:
    """Median-layer, subtree-depth and subtree-size inequalities, plus PoA <= 2+2 log alpha."""
    if not is_tree(g) or g.n < 2:
        raise PreconditionError("needs a tree with n >= 2")
    if params.alpha < 1:
        raise PreconditionError("needs alpha >= 1")
    _require_stable("bswe", g, params, limits)
    a, n = params.alpha, g.n
    root = root_median(g)
    view = tree_view(g, root)
    rep = LemmaReport("swap_tree_lemmas", fingerprint(g))
    for u in view.order:
        v = _subtree_median(g, view, u)
        rep.add("median_layer", f"u={u},median={v}", Fraction(view.layer[v]), view.layer[u] + 2 * a / n)
        size = view.subtree_size[u]
        rhs = (1 + 2 * a / n) * log2(size)
        rep.add("subtree_depth", f"u={u}", Fraction(view.subtree_depth(u)), rhs)
        if view.layer[u] >= 2:
            rep.add("subtree_cardinality", f"u={u}", Fraction(size), a / (view.layer[u] - 1))
    rep.add("swap_poa", "graph", poa(g, params), evaluate_bound("swap_poa_upper", alpha=a))
    return rep


def verify_three_bse_lemmas(g: Graph, params: GameParams, limits: Limits = DEFAULT_LIMITS) -> LemmaReport:
    """At most one deep child subtree per node, and PoA <= 25."""
    if not is_tree(g) or g.n < 2:
        raise PreconditionError("needs a tree with n >= 2")
    _require_stable("kbse:3", g, params, limits)
    a, n = params.alpha, g.n
    view = tree_view(g, root_median(g))
    threshold = 2 * math.ceil(4 * a / n) + 1
    rep = LemmaReport("three_bse_lemmas", fingerprint(g))
    for u in view.order:
        deep = sum(1 for c in view.children[u] if view.subtree_depth(c) > threshold)
        rep.add("shallow_subtrees", f"u={u}", Fraction(deep), Fraction(1))
    rep.add("three_bse_poa", "graph", poa(g, params), evaluate_bound("three_bse_upper"))
    return rep


def worst_agent_cost(g: Graph, params: GameParams) -> Fraction:
    costs = [agent_cost(g, params, u) for u in range(g.n)]
    if any(c.unreachable for c in costs):
        raise PreconditionError("needs a connected graph")
    return max(c.finite for c in costs)


def verify_dary_cost_bound(arity: int, n: int, alpha) -> LemmaReport:
    """Worst agent cost of the almost complete d-ary tree against (d+1)alpha + 2(n-1)log_d n."""
    from .constructions import almost_complete_dary

    g = almost_complete_dary(arity, n)
    a = parse_alpha(alpha)
    rep = LemmaReport("dary_cost_bound", fingerprint(g))
    rep.add(
        "dary_cost_bound",
        f"d={arity},n={n},alpha={a}",
        worst_agent_cost(g, GameParams(a)),
        evaluate_bound("dary_cost_bound", d=arity, n=n, alpha=a),
    )
    return rep
