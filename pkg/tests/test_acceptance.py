"""End-to-end acceptance checks, one test per criterion.

Each test prints nothing itself; the terminal summary lists PASS/FAIL per
criterion (see conftest.py).
"""

import math
from fractions import Fraction

import pytest

from bncg.atlas import WitnessQuery, classify_all, find_witness, hierarchy_violations
from bncg.bounds import (
    evaluate_bound,
    leq,
    reachability_limit,
    verify_dary_cost_bound,
    verify_re_poa_bound,
    verify_swap_tree_lemmas,
    verify_three_bse_lemmas,
)
from bncg.constructions import (
    clique,
    cycle,
    cycle_bse_alpha_range,
    path,
    stability_sufficient_alpha,
    star,
    stretched_binary,
    stretched_tree_star,
)
from bncg.enumeration import enumerate_free_trees, enumerate_graphs, fingerprint
from bncg.equilibria import check_stability, verify_witness
from bncg.game import GameParams, poa, social_optimum_cost
from bncg.moves import CoalitionChange, RemoveEdge

import oracles

pytestmark = pytest.mark.acceptance


def test_criterion_01_star_is_stable_under_every_concept():
    for n in (4, 5, 6):
        for a in (1, 2, 5):
            for c in ("re", "bae", "ps", "bswe", "bge", "bne", "bse"):
                rep = check_stability(c, star(n), GameParams(a))
                assert rep.stable, (n, a, c, rep.witness)


def test_criterion_02_cycle_strong_stability_ranges():
    outcomes = {}
    for n in (5, 6):
        outcomes[(n, 5)] = check_stability("bse", cycle(n), GameParams(5))
        outcomes[(n, 7)] = check_stability("bse", cycle(n), GameParams(7))
    re7 = {n: check_stability("re", cycle(n), GameParams(7)) for n in (5, 6)}
    failures = []
    for n in (5, 6):
        if not outcomes[(n, 5)].stable:
            failures.append(f"C{n} at alpha=5 is not BSE-stable: witness {outcomes[(n, 5)].witness}")
        if outcomes[(n, 7)].stable:
            failures.append(f"C{n} at alpha=7 is BSE-stable")
        if not isinstance(re7[n].witness, RemoveEdge):
            failures.append(f"C{n} at alpha=7 has no removal witness")
    assert not failures, "; ".join(failures)


def test_criterion_03_strong_stability_at_price_boundaries():
    half, one = GameParams(Fraction(1, 2)), GameParams(1)
    assert check_stability("bse", clique(5), half).stable
    assert not check_stability("bse", star(5), half).stable
    assert check_stability("bse", cycle(5), one).stable
    rep = check_stability("bse", path(4), one)
    assert not rep.stable
    assert rep.witness == CoalitionChange((0, 3), (), ((0, 3),))
    assert verify_witness("bse", path(4), one, rep.witness)


def test_criterion_04_stretched_trees_are_stable():
    assert check_stability("bge", stretched_binary(2, 1).graph, GameParams(49)).stable
    g = stretched_binary(2, 2).graph
    assert g.n == 13
    assert check_stability("bge", g, GameParams(182)).stable
    assert check_stability("bae", g, GameParams(130)).stable
    for r in (stretched_binary(2, 1), stretched_binary(2, 2)):
        for cond in stability_sufficient_alpha(r):
            assert cond.holds(cond.threshold)
            assert check_stability(cond.concept, r.graph, GameParams(max(cond.threshold, 1))).stable


def test_criterion_05_bge_equals_two_strong_on_trees():
    mismatches = []
    for n in range(1, 10):
        for t in enumerate_free_trees(n):
            for a in (1, 2, 5, 10):
                p = GameParams(a)
                if check_stability("bge", t, p).stable != check_stability("kbse:2", t, p).stable:
                    mismatches.append((fingerprint(t), a))
    assert mismatches == []


def test_criterion_06_remove_equilibrium_equals_bilateral_nash():
    mismatches = []
    for n in range(1, 6):
        for g in enumerate_graphs(n):
            for a in (Fraction(1, 2), 1, 2, 5):
                if check_stability("re", g, GameParams(a)).stable != oracles.bilateral_nash_stable(n, g.edges, a):
                    mismatches.append((fingerprint(g), a))
    assert mismatches == []


def test_criterion_07_swap_tree_lemmas():
    violations, checked = [], 0
    for n in range(2, 10):
        for t in enumerate_free_trees(n):
            for a in (1, 2, 4, 8):
                p = GameParams(a)
                if not check_stability("bswe", t, p).stable:
                    continue
                rep = verify_swap_tree_lemmas(t, p)
                checked += 1
                violations += [(rep.fingerprint, a, r) for r in rep.rows if not r.holds]
    assert checked > 0 and violations == []


def test_criterion_08_three_strong_lemmas():
    violations, checked = [], 0
    for n in range(2, 10):
        for t in enumerate_free_trees(n):
            for a in (1, 2, 5, 10):
                p = GameParams(a)
                if not check_stability("kbse:3", t, p).stable:
                    continue
                rep = verify_three_bse_lemmas(t, p)
                checked += 1
                violations += [(rep.fingerprint, a, r) for r in rep.rows if not r.holds]
    assert checked > 0 and violations == []


def test_criterion_09_per_node_price_of_anarchy_bound():
    violations, checked = [], 0
    for n in range(2, 7):
        for g in enumerate_graphs(n):
            for a in (1, 2, 5):
                p = GameParams(a)
                if not check_stability("re", g, p).stable:
                    continue
                rep = verify_re_poa_bound(g, p)
                checked += 1
                violations += [(rep.fingerprint, a, r) for r in rep.rows if not r.holds]
    assert checked > 0 and violations == []


def test_criterion_10_dary_cost_bound():
    violations = []
    for d in (2, 3, 4):
        for n in (7, 15, 31, 40):
            for a in (1, n, n * math.ceil(math.log2(n))):
                rep = verify_dary_cost_bound(d, n, a)
                violations += [r for r in rep.rows if not r.holds]
    assert violations == []


def test_criterion_11_formula_spot_values():
    assert social_optimum_cost(5, GameParams(3)) == 56
    assert evaluate_bound("trivial_poa", n=4, alpha=16) == 2
    assert reachability_limit(1) == 63
    assert cycle_bse_alpha_range(6) == (Fraction(4), Fraction(6))


def test_criterion_12_hierarchy_and_separating_witnesses():
    bad = [(r.fingerprint, r.alpha, v) for r in classify_all(6) for v in hierarchy_violations(r.status)]
    assert bad == []
    q = WitnessQuery(("re",), ("bae",), 4, alphas=(1,), tree_only=True)
    res = find_witness(q)
    assert res.found and fingerprint(res.graph) == fingerprint(path(4)) and res.alpha == 1
    p = GameParams(1)
    assert check_stability("re", res.graph, p).stable
    assert verify_witness("bae", res.graph, p, res.reports["bae"].witness)
    assert oracles.bilateral_nash_stable(res.graph.n, res.graph.edges, 1)

    q = WitnessQuery(("bae",), ("re",), 3, alphas=(5,))
    res = find_witness(q)
    assert res.found and fingerprint(res.graph) == fingerprint(clique(3)) and res.alpha == 5
    p = GameParams(5)
    assert check_stability("bae", res.graph, p).stable
    assert verify_witness("re", res.graph, p, res.reports["re"].witness)
    assert not oracles.bilateral_nash_stable(res.graph.n, res.graph.edges, 5)


def test_criterion_13_desk_scale_substitutes():
    # (a) sufficient conditions agree with the checkers where both are decidable
    r = stretched_tree_star(1, 3, 7)
    for cond in stability_sufficient_alpha(r):
        a = next(x for x in range(1, 500) if cond.holds(x))
        assert check_stability(cond.concept, r.graph, GameParams(a)).stable, cond
    # (b) the lower-bound formula never exceeds the measured PoA
    for t in range(3, 8):
        for eta in range(2 * t + 1, 26):
            g = stretched_tree_star(1, t, eta).graph
            for a in (1, 2, 5, 10, g.n, g.n * g.n):
                lower = evaluate_bound("star_poa_lower", alpha=a, n=g.n, k=1, t=t)
                assert leq(lower, poa(g, GameParams(a)))
    # (c) hand-derived evaluator values
    assert evaluate_bound("poa_node_bound", alpha=3, n=5, dist_u=7) == Fraction(10, 7)
    assert evaluate_bound("swap_poa_upper", alpha=4) == 6
    assert evaluate_bound("bge_poa_lower", alpha=2**9) == Fraction(9, 4) - Fraction(17, 8)
    assert reachability_limit(Fraction(1, 2)) == 7 and reachability_limit(2) == 174763
