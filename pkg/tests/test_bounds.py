import math
from fractions import Fraction

import pytest

from bncg.bounds import (
    BOUNDS,
    FLOAT_SLACK,
    BoundDomainError,
    PreconditionError,
    evaluate_bound,
    leq,
    log2,
    reachability_constant,
    reachability_limit,
    root_median,
    verify_dary_cost_bound,
    verify_re_poa_bound,
    verify_swap_tree_lemmas,
    verify_three_bse_lemmas,
    worst_agent_cost,
)
from bncg.constructions import cycle, path, star, stretched_tree_star
from bncg.enumeration import enumerate_free_trees, enumerate_graphs
from bncg.equilibria import check_stability
from bncg.game import GameParams, poa

GRID = [Fraction(1), Fraction(2), Fraction(4), Fraction(8)]


def test_bound_examples():
    assert evaluate_bound("poa_node_bound", alpha=3, n=5, dist_u=7) == Fraction(10, 7)
    assert evaluate_bound("trivial_poa", n=4, alpha=16) == 2
    assert evaluate_bound("swap_poa_upper", alpha=4) == 6
    assert evaluate_bound("social_cost_node_bound", alpha=2, n=4, dist_u=3) == 30
    assert evaluate_bound("bge_poa_lower", alpha=2**20) == Fraction(5) - Fraction(17, 8)
    assert evaluate_bound("bne_lower_ii", alpha=16, epsilon=Fraction(1, 2)) == Fraction(1, 2) - Fraction(9, 8)
    assert evaluate_bound("bne_lower_i", alpha=2**8, epsilon=1) == Fraction(8, 168) - Fraction(3, 28)
    assert evaluate_bound("three_bse_upper") == 25
    assert evaluate_bound("worst_node_bound", alpha=1, n=5, cost_u=10) == 2
    assert evaluate_bound("bse_small_alpha", alpha=2, n=64, epsilon=Fraction(1, 2)) == 7
    assert evaluate_bound("bse_large_alpha", alpha=64, n=16) == 5
    assert evaluate_bound("bne_small_alpha_upper", alpha=4, n=16) == 4
    assert math.isclose(evaluate_bound("dary_cost_bound", d=2, n=8, alpha=1), 3 + 2 * 7 * 3)
    v = evaluate_bound("star_poa_lower", alpha=10, n=22, k=1, t=64)
    assert v == Fraction(22 * (6 - Fraction(9, 2)), 2 * 31)
    n = 2**16
    assert math.isclose(evaluate_bound("bse_general", n=n), 2 + 4 + 32 / 2)


def test_every_bound_has_an_evaluator():
    assert len(BOUNDS) == 16


@pytest.mark.parametrize(
    "bound,params",
    [
        ("bse_general", {"n": 4}),
        ("bne_small_alpha_upper", {"alpha": 1, "n": 15}),
        ("bne_small_alpha_upper", {"alpha": 5, "n": 16}),
        ("bse_large_alpha", {"alpha": 3, "n": 16}),
        ("bse_small_alpha", {"alpha": 16, "n": 16, "epsilon": Fraction(1, 2)}),
        ("swap_poa_upper", {}),
        ("poa_node_bound", {"alpha": 1, "n": 1, "dist_u": 0}),
        ("dary_cost_bound", {"alpha": 1, "n": 5, "d": 1}),
    ],
)
def test_domain_errors(bound, params):
    with pytest.raises(BoundDomainError):
        evaluate_bound(bound, **params)


def test_unknown_bound():
    with pytest.raises(ValueError):
        evaluate_bound("nope")


def test_reachability():
    assert reachability_constant(1) == 31 and reachability_limit(1) == 63
    assert reachability_constant(Fraction(1, 2)) == 3 and reachability_limit(Fraction(1, 2)) == 7
    assert reachability_constant(2) == 87381 and reachability_limit(2) == 174763
    # 4p rounded up: p = 0.6 behaves like p = 3/4
    assert reachability_limit(Fraction(3, 5)) == reachability_limit(Fraction(3, 4))
    for p in (Fraction(1, 2), 1, Fraction(3, 2), 2):
        m = reachability_limit(p)
        assert Fraction(m, 2) > reachability_constant(p) >= Fraction(m - 1, 2)


def test_log_and_slack():
    assert log2(8) == 3 and isinstance(log2(8), Fraction)
    assert log2(Fraction(1, 4)) == -2
    assert abs(log2(3) - math.log2(3)) < 1e-15
    assert leq(Fraction(1), Fraction(1))
    assert not leq(1.0, 1.0)
    assert leq(1.0, 1.0 + 2 * FLOAT_SLACK)


def test_re_poa_examples():
    rep = verify_re_poa_bound(star(6), GameParams(2))
    assert rep.all_hold
    centre = [r for r in rep.rows if r.lemma == "node_poa" and r.subject == "u=0"][0]
    assert centre.lhs == centre.rhs == 1
    rep = verify_re_poa_bound(path(4), GameParams(1))
    inner = [r for r in rep.rows if r.lemma == "node_poa" and r.subject == "u=1"][0]
    assert inner.rhs == Fraction(5, 4) and inner.lhs == Fraction(13, 12)
    assert verify_re_poa_bound(cycle(5), GameParams(4)).all_hold
    with pytest.raises(PreconditionError):
        verify_re_poa_bound(cycle(5), GameParams(5))


@pytest.mark.parametrize("n", range(2, 7))
def test_re_poa_bound_on_all_stable_graphs(n):
    for g in enumerate_graphs(n):
        for a in GRID + [Fraction(3, 2), Fraction(5)]:
            p = GameParams(a)
            if check_stability("re", g, p).stable:
                assert verify_re_poa_bound(g, p).all_hold


def test_swap_examples():
    assert verify_swap_tree_lemmas(star(8), GameParams(1)).all_hold
    p = GameParams(8)
    assert check_stability("bswe", path(5), p).stable
    rep = verify_swap_tree_lemmas(path(5), p)
    assert rep.all_hold
    rows = [r for r in rep.rows if r.lemma == "subtree_cardinality"]
    assert rows and all(r.rhs == 8 for r in rows)


@pytest.mark.parametrize("n", range(2, 10))
def test_swap_lemmas_on_all_stable_trees(n):
    for t in enumerate_free_trees(n):
        for a in GRID:
            p = GameParams(a)
            if check_stability("bswe", t, p).stable:
                rep = verify_swap_tree_lemmas(t, p)
                assert rep.all_hold, [r for r in rep.rows if not r.holds]
            if check_stability("bge", t, p).stable:
                assert leq(poa(t, p), evaluate_bound("swap_poa_upper", alpha=a))


def test_three_bse_examples():
    assert verify_three_bse_lemmas(star(7), GameParams(3)).all_hold
    with pytest.raises(PreconditionError):
        verify_three_bse_lemmas(path(6), GameParams(1))


@pytest.mark.slow
@pytest.mark.parametrize("n", range(2, 10))
def test_three_bse_lemmas_on_all_stable_trees(n):
    for t in enumerate_free_trees(n):
        for a in (1, 2, 5, 10):
            p = GameParams(a)
            if check_stability("kbse:3", t, p).stable:
                assert verify_three_bse_lemmas(t, p).all_hold


def test_root_median_is_smallest():
    assert root_median(path(4)) == 1
    assert root_median(star(5)) == 0


@pytest.mark.parametrize("arity", [2, 3, 4])
def test_dary_cost_bound(arity):
    for n in range(7, 41):
        for a in (1, 2, n, Fraction(round(n * math.log2(n) * 1000), 1000)):
            rep = verify_dary_cost_bound(arity, n, a)
            assert rep.all_hold, rep.rows


def test_star_poa_lower_below_measured():
    for k, t, eta in [(1, 3, 7), (1, 7, 15), (1, 15, 31), (2, 5, 11), (2, 13, 27)]:
        r = stretched_tree_star(k, t, eta)
        for a in (1, 10, 100, 1000):
            p = GameParams(a)
            lower = evaluate_bound("star_poa_lower", alpha=a, n=r.graph.n, k=k, t=t)
            assert leq(lower, poa(r.graph, p))


def test_worst_agent_cost():
    assert worst_agent_cost(star(4), GameParams(2)) == 9
