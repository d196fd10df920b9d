"""Exhaustive classification of small graphs, separating-witness search,
improving-move dynamics and price-of-anarchy surveys."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .enumeration import enumerate_free_trees, enumerate_graphs, fingerprint, labeled_fingerprint
from .equilibria import (
    DEFAULT_LIMITS,
    Limits,
    SearchBudgetExceeded,
    StabilityReport,
    all_edge_assignments,
    check_stability,
    improving_moves,
    parse_concept,
    verify_witness,
)
from .game import ExtendedCost, GameParams, agent_cost, format_scalar, poa
from .graph import Graph, is_connected
from .moves import apply_move

DEFAULT_CONCEPTS = ("re", "bae", "ps", "bswe", "bge", "bne", "kbse:2", "kbse:3", "bse")
BSE_MAX_N = 6

# (subset, superset) pairs of the inclusion hierarchy
HIERARCHY = (
    ("bse", "kbse:3"),
    ("kbse:3", "kbse:2"),
    ("kbse:2", "bge"),
    ("bse", "bne"),
    ("bne", "bge"),
    ("bge", "ps"),
    ("bge", "bswe"),
    ("ps", "re"),
    ("ps", "bae"),
)


def default_alpha_grid(n: int) -> list[Fraction]:
    grid = {Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5), Fraction(n, 2), Fraction(n), Fraction(2 * n)}
    return sorted(a for a in grid if a > 0)


def alpha_pq(a: Fraction) -> str:
    a = Fraction(a)
    return f"{a.numerator}/{a.denominator}"


@dataclass
class ClassificationRow:
    n: int
    alpha: Fraction
    fingerprint: str
    status: dict[str, str]
    graph: Graph = field(repr=False, compare=False, default=None)


def _status_of(concept: str, g: Graph, params: GameParams, limits: Limits, bse_max_n: int) -> str:
    c = parse_concept(concept)
    if c.kind == "bse" and g.n > bse_max_n:
        return "B"
    if c.kind in ("uni-re", "uni-ne"):
        return _assignment_status(c, g, params, limits)
    try:
        return check_stability(c, g, params, limits).status
    except SearchBudgetExceeded:
        return "B"


def _assignment_status(c, g, params, limits) -> str:
    """Stable for some edge assignment -> "S"; unstable for all -> "U"."""
    undecided = False
    for f in all_edge_assignments(g):
        try:
            rep = check_stability(c, g, params, limits, assignment=f)
        except SearchBudgetExceeded:
            undecided = True
            continue
        if rep.stable:
            return "S"
        undecided |= rep.status == "B"
    return "B" if undecided else "U"


def _classify_one(args) -> list[ClassificationRow]:
    g, alphas, concepts, limits, bse_max_n = args
    fp = fingerprint(g)
    rows = []
    for a in alphas:
        params = GameParams(a)
        status = {str(parse_concept(c)): _status_of(c, g, params, limits, bse_max_n) for c in concepts}
        rows.append(ClassificationRow(g.n, params.alpha, fp, status, g))
    return rows


def _graphs(n: int, connected_only: bool, trees_only: bool) -> Iterator[Graph]:
    if trees_only:
        return enumerate_free_trees(n)
    return enumerate_graphs(n, connected_only)


def classify_all(
    n_max: int,
    alphas: Sequence | None = None,
    concepts: Iterable[str] = DEFAULT_CONCEPTS,
    limits: Limits = DEFAULT_LIMITS,
    *,
    n_min: int = 1,
    connected_only: bool = True,
    trees_only: bool = False,
    bse_max_n: int = BSE_MAX_N,
    workers: int = 1,
) -> Iterator[ClassificationRow]:
    """One row per (isomorphism class, alpha), by n, then graph order, then alpha.

    ``alphas=None`` uses :func:`default_alpha_grid` for each n.  BSE above
    ``bse_max_n`` nodes is reported as undecided ("B") without searching.
    """
    concepts = tuple(str(parse_concept(c)) for c in concepts)
    for n in range(n_min, n_max + 1):
        grid = sorted({Fraction(a) for a in alphas}) if alphas is not None else default_alpha_grid(n)
        jobs = [(g, grid, concepts, limits, bse_max_n) for g in _graphs(n, connected_only, trees_only)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_classify_one, jobs, chunksize=8))
        else:
            results = map(_classify_one, jobs)
        for rows in results:
            yield from rows


def hierarchy_violations(status: dict[str, str]) -> list[tuple[str, str]]:
    """Inclusions contradicted by decided entries of one row."""
    bad = []
    for sub, sup in HIERARCHY:
        if status.get(sub) == "S" and status.get(sup) == "U":
            bad.append((sub, sup))
    # conjunction identities
    for comp, parts in (("ps", ("re", "bae")), ("bge", ("ps", "bswe"))):
        vals = [status.get(x) for x in (comp,) + parts]
        if None in vals or "B" in vals:
            continue
        if (vals[0] == "S") != all(v == "S" for v in vals[1:]):
            bad.append((comp, "+".join(parts)))
    return bad


def rows_to_csv(rows: Iterable[ClassificationRow], concepts: Sequence[str] = DEFAULT_CONCEPTS) -> str:
    concepts = [str(parse_concept(c)) for c in concepts]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "alpha", "fingerprint"] + concepts)
    for r in rows:
        w.writerow([r.n, alpha_pq(r.alpha), r.fingerprint] + [r.status[c] for c in concepts])
    return buf.getvalue()


# -- witness search ---------------------------------------------------------


@dataclass(frozen=True)
class WitnessQuery:
    """Find a graph stable for every ``in_concepts`` and unstable for every ``out_concepts``.

    Assignment-dependent concepts (uni-re, uni-ne) count as stable if some
    edge assignment makes the graph stable.
    """

    in_concepts: tuple[str, ...]
    out_concepts: tuple[str, ...]
    n_max: int
    alphas: tuple | None = None
    tree_only: bool = False
    n_min: int = 1
    connected_only: bool = True

    def __post_init__(self) -> None:
        ins = {str(parse_concept(c)) for c in self.in_concepts}
        outs = {str(parse_concept(c)) for c in self.out_concepts}
        if ins & outs:
            raise ValueError(f"concepts both required and excluded: {sorted(ins & outs)}")
        object.__setattr__(self, "in_concepts", tuple(sorted(ins)))
        object.__setattr__(self, "out_concepts", tuple(sorted(outs)))


@dataclass
class WitnessResult:
    found: bool
    graph: Graph | None = None
    alpha: Fraction | None = None
    reports: dict = field(default_factory=dict)
    assignment: object | None = None
    budget_hits: int = 0
    searched: int = 0

    @property
    def outcome(self) -> str:
        return "found" if self.found else "none found within bounds"

    def to_dict(self) -> dict:
        from .graph import to_json

        out = {"outcome": self.outcome, "searched": self.searched, "budget_hits": self.budget_hits}
        if self.found:
            out.update(
                graph=to_json(self.graph),
                fingerprint=fingerprint(self.graph),
                alpha=format_scalar(self.alpha),
                reports={k: v.to_dict() for k, v in self.reports.items()},
            )
            if self.assignment is not None:
                out["assignment"] = [[u, v, o] for (u, v), o in sorted(self.assignment.owner.items())]
        return out


def _membership(concept: str, g: Graph, params: GameParams, limits: Limits):
    """Return (status, report, assignment) with existential treatment of assignments."""
    c = parse_concept(concept)
    if c.kind not in ("uni-re", "uni-ne"):
        rep = check_stability(c, g, params, limits)
        return rep.status, rep, None
    last = None
    undecided = False
    for f in all_edge_assignments(g):
        try:
            rep = check_stability(c, g, params, limits, assignment=f)
        except SearchBudgetExceeded:
            undecided = True
            continue
        if rep.stable:
            return "S", rep, f
        last = (rep, f)
    if undecided:
        return "B", None, None
    return "U", last[0] if last else None, last[1] if last else None


def find_witness(q: WitnessQuery, limits: Limits = DEFAULT_LIMITS) -> WitnessResult:
    """Smallest (n, alpha, graph) in search order satisfying the query."""
    result = WitnessResult(False)
    for n in range(q.n_min, q.n_max + 1):
        grid = sorted({Fraction(a) for a in q.alphas}) if q.alphas is not None else default_alpha_grid(n)
        graphs = list(_graphs(n, q.connected_only, q.tree_only))
        for a in grid:
            params = GameParams(a)
            for g in graphs:
                result.searched += 1
                reports = {}
                ok = True
                assignment = None
                for c in q.out_concepts:
                    try:
                        status, rep, f = _membership(c, g, params, limits)
                    except SearchBudgetExceeded:
                        status, rep = "B", None
                    if status != "U":
                        result.budget_hits += status == "B"
                        ok = False
                        break
                    reports[c] = rep
                if not ok:
                    continue
                for c in q.in_concepts:
                    try:
                        status, rep, f = _membership(c, g, params, limits)
                    except SearchBudgetExceeded:
                        status, rep = "B", None
                    if status != "S":
                        result.budget_hits += status == "B"
                        ok = False
                        break
                    reports[c] = rep
                    if f is not None:
                        assignment = f
                if ok:
                    return WitnessResult(True, g, params.alpha, reports, assignment, result.budget_hits, result.searched)
    return result


# -- dynamics ---------------------------------------------------------------

_DYN_PARTS = {"ps": ("re", "bae"), "bge": ("re", "bae", "bswe")}


@dataclass
class DynamicsResult:
    trajectory: list
    terminal: Graph
    report: StabilityReport | None
    status: str  # stable | step_limit | cycle | budget

    def to_dict(self) -> dict:
        from .graph import to_json
        from .moves import move_to_dict

        return {
            "status": self.status,
            "steps": len(self.trajectory),
            "trajectory": [move_to_dict(m) for m in self.trajectory],
            "terminal": to_json(self.terminal),
            "report": None if self.report is None else self.report.to_dict(),
        }


def _gain(g: Graph, h: Graph, params: GameParams, move) -> ExtendedCost:
    total = ExtendedCost(0, Fraction(0))
    for x in move.consulted():
        total = total + (agent_cost(g, params, x) - agent_cost(h, params, x))
    return total


def _best_move(concept, g: Graph, params: GameParams, limits: Limits):
    c = parse_concept(concept)
    parts = _DYN_PARTS.get(c.kind, (str(c),))
    best = None
    for part in parts:
        for m in improving_moves(part, g, params, limits):
            gain = _gain(g, apply_move(g, m), params, m)
            if best is None or gain > best[0]:
                best = (gain, m)
    return None if best is None else best[1]


def run_dynamics(
    g0: Graph,
    params: GameParams,
    concept: str,
    policy: str = "first",
    max_steps: int = 1000,
    limits: Limits = DEFAULT_LIMITS,
) -> DynamicsResult:
    """Apply improving moves until stable, a repeated graph, or the step limit.

    ``first`` applies the canonical witness; ``best`` applies the move with
    the largest total gain of its consulted agents (canonical order breaks ties).
    """
    c = parse_concept(concept)
    if c.kind.startswith("uni"):
        raise ValueError("dynamics are defined for the bilateral concepts only")
    if policy not in ("first", "best"):
        raise ValueError(f"unknown policy {policy!r}")
    g = g0
    seen = {labeled_fingerprint(g)}
    trajectory = []
    for _ in range(max_steps + 1):
        try:
            report = check_stability(c, g, params, limits)
        except SearchBudgetExceeded:
            return DynamicsResult(trajectory, g, None, "budget")
        if report.stable:
            return DynamicsResult(trajectory, g, report, "stable")
        if report.witness is None:
            return DynamicsResult(trajectory, g, report, "budget")
        if len(trajectory) == max_steps:
            return DynamicsResult(trajectory, g, report, "step_limit")
        move = report.witness
        if policy == "best":
            try:
                move = _best_move(c, g, params, limits) or move
            except SearchBudgetExceeded:
                pass
        if not verify_witness(c, g, params, move):
            raise AssertionError(f"generator produced a non-improving move {move}")
        g = apply_move(g, move)
        trajectory.append(move)
        key = labeled_fingerprint(g)
        if key in seen:
            return DynamicsResult(trajectory, g, None, "cycle")
        seen.add(key)
    raise AssertionError("unreachable")


# -- price of anarchy survey ------------------------------------------------


@dataclass
class SurveyRow:
    alpha: Fraction
    stable: int
    undecided: int
    max_poa: Fraction | None
    argmax: str | None


def survey_poa(
    concept: str,
    n: int,
    alphas: Sequence,
    tree_only: bool = False,
    limits: Limits = DEFAULT_LIMITS,
) -> list[SurveyRow]:
    """Largest PoA among stable connected graphs (or trees) on n nodes, per alpha."""
    c = parse_concept(concept)
    graphs = list(_graphs(n, True, tree_only))
    out = []
    for a in sorted(Fraction(x) for x in alphas):
        params = GameParams(a)
        stable = undecided = 0
        best: tuple[Fraction, str] | None = None
        for g in graphs:
            if not is_connected(g) or g.n < 2:
                continue
            try:
                rep = check_stability(c, g, params, limits)
            except SearchBudgetExceeded:
                undecided += 1
                continue
            if rep.status == "B":
                undecided += 1
            if not rep.stable:
                continue
            stable += 1
            value = poa(g, params)
            if best is None or value > best[0]:
                best = (value, fingerprint(g))
        out.append(SurveyRow(a, stable, undecided, best[0] if best else None, best[1] if best else None))
    return out
