from fractions import Fraction

import pytest

from bncg.atlas import (
    DEFAULT_CONCEPTS,
    WitnessQuery,
    alpha_pq,
    classify_all,
    default_alpha_grid,
    find_witness,
    hierarchy_violations,
    rows_to_csv,
    run_dynamics,
    survey_poa,
)
from bncg.constructions import clique, cycle, path, star
from bncg.enumeration import enumerate_free_trees, fingerprint
from bncg.equilibria import Limits, check_stability, verify_witness
from bncg.game import GameParams, poa
from bncg.graph import Graph


def _row(rows, g, alpha):
    fp = fingerprint(g)
    return next(r for r in rows if r.fingerprint == fp and r.alpha == alpha)


def test_default_grid():
    assert default_alpha_grid(4) == [Fraction(1, 2), 1, 2, 4, 5, 8]
    assert alpha_pq(Fraction(2)) == "2/1"


def test_small_rows():
    rows = list(classify_all(4, alphas=[1, 5]))
    tri = _row(rows, clique(3), 1)
    assert tri.status["re"] == "S" and tri.status["bae"] == "S"
    p4 = _row(rows, path(4), 1)
    assert p4.status["re"] == "S" and p4.status["bae"] == "U"
    paw = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    row = _row(rows, paw, 5)
    assert set(row.status.values()) <= {"S", "U"}
    assert len(row.status) == len(DEFAULT_CONCEPTS)


def test_classification_order_is_deterministic():
    a = [(r.n, r.alpha, r.fingerprint, r.status) for r in classify_all(5, alphas=[1, 3])]
    b = [(r.n, r.alpha, r.fingerprint, r.status) for r in classify_all(5, alphas=[3, 1])]
    assert a == b
    assert [r.n for r in classify_all(4, alphas=[1])] == sorted(r.n for r in classify_all(4, alphas=[1]))


def test_parallel_matches_sequential():
    seq = rows_to_csv(classify_all(5))
    par = rows_to_csv(classify_all(5, workers=2))
    assert seq == par


def test_no_hierarchy_violations_up_to_six():
    bad = [(r.fingerprint, r.alpha, v) for r in classify_all(6) for v in hierarchy_violations(r.status)]
    assert bad == []


def test_hierarchy_violations_detects_contradiction():
    s = {c: "S" for c in DEFAULT_CONCEPTS}
    s["re"] = "U"
    assert ("ps", "re") in hierarchy_violations(s)
    s["re"] = "B"
    assert hierarchy_violations(s) == []


def test_bse_above_cap_is_undecided():
    rows = list(classify_all(3, alphas=[1], concepts=["bse"], bse_max_n=2, n_min=3))
    assert all(r.status["bse"] == "B" for r in rows)


def test_budget_marks_rows():
    rows = list(classify_all(5, alphas=[2], concepts=["bne"], n_min=5, limits=Limits(move_cap=3)))
    assert any(r.status["bne"] == "B" for r in rows)


def test_csv_layout():
    text = rows_to_csv(classify_all(2, alphas=[Fraction(1, 2)], concepts=["re", "bae"]), ["re", "bae"])
    lines = text.strip().splitlines()
    assert lines[0] == "n,alpha,fingerprint,re,bae"
    assert lines[1] == "1,1/2,1:,S,S"
    assert lines[2] == "2,1/2,2:0-1,S,S"


# -- witnesses ----------------------------------------------------------------


def _reverify(q, res):
    for c in q.in_concepts + q.out_concepts:
        rep = res.reports[c]
        if c in q.in_concepts:
            assert rep.stable
        else:
            assert not rep.stable
            assert verify_witness(c, res.graph, GameParams(res.alpha), rep.witness, res.assignment)


def test_remove_stable_but_not_add_stable():
    q = WitnessQuery(("re",), ("bae",), 4, alphas=(1,), tree_only=True)
    res = find_witness(q)
    assert res.found and fingerprint(res.graph) == fingerprint(path(4)) and res.alpha == 1
    _reverify(q, res)
    assert check_stability("re", res.graph, GameParams(1)).stable


def test_add_stable_but_not_remove_stable():
    q = WitnessQuery(("bae",), ("re",), 3, alphas=(5,))
    res = find_witness(q)
    assert res.found and fingerprint(res.graph) == fingerprint(clique(3))
    _reverify(q, res)


def test_witness_none_within_bounds():
    q = WitnessQuery(("bse",), ("re",), 4, alphas=(1,))
    res = find_witness(q)
    assert not res.found and res.outcome == "none found within bounds"
    assert res.to_dict()["outcome"] == "none found within bounds"


def test_query_rejects_overlap():
    with pytest.raises(ValueError):
        WitnessQuery(("re",), ("RE",), 3)


def test_unilateral_nash_but_not_pairwise_stable():
    q = WitnessQuery(("uni-ne",), ("ps",), 5, alphas=(1, 2, 5))
    res = find_witness(q)
    assert res.found and res.assignment is not None
    from bncg.equilibria import check_unilateral_ne

    assert check_unilateral_ne(res.graph, res.assignment, GameParams(res.alpha)).stable
    assert not check_stability("ps", res.graph, GameParams(res.alpha)).stable


# -- dynamics -----------------------------------------------------------------


def test_dynamics_adds_to_clique():
    res = run_dynamics(path(4), GameParams(Fraction(1, 2)), "bae")
    assert res.status == "stable" and len(res.trajectory) <= 6
    assert check_stability("bae", res.terminal, GameParams(Fraction(1, 2))).stable


def test_dynamics_star_is_fixed():
    for c in ("re", "bae", "ps", "bge", "bne", "bse"):
        res = run_dynamics(star(6), GameParams(2), c)
        assert res.trajectory == [] and res.status == "stable"


def test_dynamics_cycle_removal():
    res = run_dynamics(cycle(6), GameParams(7), "re")
    assert len(res.trajectory) >= 1 and res.trajectory[0].__class__.__name__ == "RemoveEdge"


def test_dynamics_best_policy_and_step_limit():
    res = run_dynamics(path(6), GameParams(Fraction(1, 2)), "ps", policy="best")
    assert res.status == "stable"
    res = run_dynamics(path(6), GameParams(Fraction(1, 2)), "ps", max_steps=1)
    assert res.status == "step_limit" and len(res.trajectory) == 1
    with pytest.raises(ValueError):
        run_dynamics(path(3), GameParams(1), "re", policy="random")


# -- PoA survey ---------------------------------------------------------------


def test_survey_ps_dominates_bge():
    ps = survey_poa("ps", 8, [4], tree_only=True)[0]
    bge = survey_poa("bge", 8, [4], tree_only=True)[0]
    assert ps.max_poa >= bge.max_poa


def test_survey_matches_direct_scan():
    (row,) = survey_poa("re", 6, [2], tree_only=True)
    p = GameParams(2)
    values = [poa(t, p) for t in enumerate_free_trees(6) if check_stability("re", t, p).stable]
    assert row.stable == len(values) and row.max_poa == max(values)


@pytest.mark.slow
def test_survey_three_strong_below_25():
    for row in survey_poa("kbse:3", 9, [1, 2, 5, 10], tree_only=True):
        assert row.max_poa is None or row.max_poa <= 25


def test_survey_monotone_along_cooperation():
    for a in (1, 2, 5):
        maxima = [survey_poa(c, 6, [a], tree_only=True)[0].max_poa or 0 for c in ("bse", "kbse:3", "kbse:2", "ps")]
        assert maxima == sorted(maxima)
