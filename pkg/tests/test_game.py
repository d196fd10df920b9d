from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bncg.constructions import clique, path, star
from bncg.enumeration import enumerate_graphs
from bncg.equilibria import Limits, check_stability
from bncg.game import (
    DisconnectedGraphError,
    ExtendedCost,
    GameParams,
    agent_cost,
    cost_delta,
    parse_alpha,
    poa,
    social_cost,
    social_optimum_cost,
)
from bncg.graph import Graph, is_connected
from bncg.moves import AddEdge, MoveNotApplicable, RemoveEdge

from oracles import cost
from test_graph import graphs

GRID = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)]


def test_extended_cost_is_lexicographic():
    assert ExtendedCost(0, 10**9) < ExtendedCost(1, 0)
    assert ExtendedCost(1, 3) < ExtendedCost(1, 4)
    assert ExtendedCost(1, 2) - ExtendedCost(0, 5) == ExtendedCost(1, -3)
    assert (ExtendedCost(0, -1)).is_negative()


def test_parse_alpha():
    assert parse_alpha("3/4") == Fraction(3, 4)
    assert parse_alpha("0.1") == Fraction(1, 10)
    assert parse_alpha("5") == 5
    for bad in ("0", "-1", "x", "1/0"):
        with pytest.raises(ValueError):
            parse_alpha(bad)
    with pytest.raises(TypeError):
        parse_alpha(0.5)


def test_agent_cost_examples():
    p = GameParams(2)
    assert agent_cost(star(4), p, 0) == ExtendedCost(0, 9)
    assert agent_cost(star(4), p, 1) == ExtendedCost(0, 7)
    assert agent_cost(Graph(1), p, 0) == ExtendedCost(0, 0)


def test_social_cost_examples():
    assert social_cost(path(3), GameParams(2)) == ExtendedCost(0, 16)
    assert social_cost(clique(3), GameParams(1)) == ExtendedCost(0, 12)
    # Dist(center)=4, Dist(leaf)=7, buy 2*4*1: 8 + 4 + 4*7 = 40
    assert social_cost(star(5), GameParams(1)) == ExtendedCost(0, 40)


def test_social_optimum_examples():
    assert social_optimum_cost(5, GameParams(3)) == 56
    assert social_optimum_cost(3, GameParams("1/2")) == 9
    assert social_optimum_cost(1, GameParams(7)) == 0


def test_optimum_formulas_agree_at_one():
    for n in range(1, 101):
        assert 2 * (n - 1) * (1 + n - 1) == n * (n - 1) * 2
        social_optimum_cost(n, GameParams(1))  # asserts internally


def test_poa_examples():
    assert poa(star(6), GameParams(2)) == 1
    assert poa(path(4), GameParams(1)) == Fraction(13, 12)
    assert poa(clique(4), GameParams("1/2")) == 1
    with pytest.raises(DisconnectedGraphError):
        poa(Graph(3, frozenset({(0, 1)})), GameParams(1))
    with pytest.raises(ValueError):
        poa(Graph(1), GameParams(1))


def test_cost_delta_examples():
    assert cost_delta(path(3), GameParams(1), 0, AddEdge(0, 2)) == ExtendedCost(0, 0)
    assert cost_delta(clique(3), GameParams(5), 0, RemoveEdge(0, 1)) == ExtendedCost(0, -4)
    assert cost_delta(path(2), GameParams(1), 0, RemoveEdge(0, 1)) == ExtendedCost(1, -2)
    with pytest.raises(MoveNotApplicable):
        cost_delta(path(3), GameParams(1), 0, AddEdge(0, 1))
    with pytest.raises(MoveNotApplicable):
        cost_delta(path(3), GameParams(1), 0, RemoveEdge(0, 2))


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=7), st.sampled_from(GRID))
def test_costs_match_oracle(g, alpha):
    p = GameParams(alpha)
    total = ExtendedCost(0, 0)
    for u in range(g.n):
        unreach, value = cost(g.n, g.edges, alpha, u)
        assert agent_cost(g, p, u) == ExtendedCost(unreach, value)
        total = total + ExtendedCost(unreach, value)
    assert social_cost(g, p) == total
    buy = sum(alpha * g.degree(u) for u in range(g.n))
    assert buy == 2 * alpha * g.m


@pytest.mark.parametrize("n", range(2, 7))
def test_poa_at_least_one(n):
    for g in enumerate_graphs(n):
        for a in GRID + [Fraction(n), Fraction(n * n)]:
            assert poa(g, GameParams(a)) >= 1


@pytest.mark.parametrize("n", range(2, 7))
def test_star_and_clique_attain_optimum(n):
    for a in GRID:
        best = star(n) if a >= 1 else clique(n)
        assert social_cost(best, GameParams(a)).finite == social_optimum_cost(n, GameParams(a))


@pytest.mark.parametrize("n", range(1, 7))
def test_literal_sentinel_agrees_with_lexicographic_order(n):
    concepts = ["re", "bae", "bswe", "bne", "kbse:2"] + (["bse"] if n <= 5 else [])
    lex, lit = Limits(), Limits(literal_m=True)
    for g in enumerate_graphs(n, connected_only=False):
        for a in GRID:
            p = GameParams(a)
            for c in concepts:
                r1, r2 = check_stability(c, g, p, lex), check_stability(c, g, p, lit)
                assert (r1.stable, r1.witness) == (r2.stable, r2.witness), (g, a, c)
