"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 undecided within budget (partial
results are still written), 3 a verification sweep found violations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import atlas, bounds, constructions, enumeration
from .constructions import ConstructionError, ConstructionSpec, construct
from .enumeration import EnumerationCapExceeded, fingerprint
from .equilibria import (
    AssignmentError,
    EdgeAssignment,
    Limits,
    SearchBudgetExceeded,
    check_stability,
    parse_concept,
)
from .game import DisconnectedGraphError, GameParams, format_scalar, parse_alpha, poa, social_cost, social_optimum_cost
from .graph import GraphError, read_graph, to_edgelist, to_json

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_VIOLATION = 0, 1, 2, 3


class InputError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (Fraction, int)):
        return format_scalar(x)
    return repr(float(x))


def _limits(args) -> Limits:
    return Limits(
        bne_center_cap=args.bne_cap,
        coalition_cap=args.coalition_cap,
        table_max_n=args.table_max_n,
        literal_m=args.literal_m,
    )


def _workers(args) -> int:
    env = os.environ.get("BNCG_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"BNCG_WORKERS must be an integer, got {env!r}") from None
    return max(1, args.workers)


def _read_graph(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return read_graph(text)


def _alphas(text: str | None):
    if text is None:
        return None
    return [parse_alpha(x) for x in text.split(",") if x.strip()]


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_nmax(n: int, args) -> None:
    if n > args.enum_cap:
        raise InputError(f"--nmax {n} exceeds the enumeration cap {args.enum_cap}")


# -- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    spec = ConstructionSpec(
        args.family, n=args.n, d=args.d, k=args.k, t=args.t, eta=args.eta, arity=args.arity
    )
    res = construct(spec)
    meta = {"family": res.family, "root": res.root, "fingerprint": fingerprint(res.graph)}
    meta.update({k: (format_scalar(v) if isinstance(v, Fraction) else v) for k, v in res.metadata.items()})
    if args.format == "json":
        obj = to_json(res.graph)
        obj["metadata"] = meta
        text = json.dumps(obj) + "\n"
    else:
        text = to_edgelist(res.graph) + "# metadata " + json.dumps(meta) + "\n"
    _emit(text, args.output)
    if args.output:
        sys.stdout.write(json.dumps(meta) + "\n")
    return EXIT_OK


def _load_assignment(path: str, g) -> EdgeAssignment:
    try:
        rows = json.load(open(path, encoding="utf-8"))
        owner = {(int(u), int(v)): int(o) for u, v, o in rows}
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"malformed assignment file {path}: {exc}") from None
    return EdgeAssignment(g, owner)


def cmd_check(args) -> int:
    g = _read_graph(args.graph)
    params = GameParams(parse_alpha(args.alpha))
    concept = parse_concept(args.concept)
    limits = _limits(args)
    if concept.kind in ("uni-re", "uni-ne"):
        if args.assignment:
            rep = check_stability(concept, g, params, limits, assignment=_load_assignment(args.assignment, g))
            out = rep.to_dict()
        else:
            status, rep, f = atlas._membership(str(concept), g, params, limits)
            out = rep.to_dict() if rep is not None else {"concept": str(concept)}
            out["scope"] = "some assignment" if status == "S" else "every assignment"
            out["status"] = {"S": "stable", "U": "unstable", "B": "budget"}[status]
            out["stable"] = status == "S"
            if f is not None:
                out["assignment"] = [[u, v, o] for (u, v), o in sorted(f.owner.items())]
    else:
        try:
            rep = check_stability(concept, g, params, limits)
        except SearchBudgetExceeded as exc:
            out = {"concept": concept.label, "stable": False, "status": "budget", "witness": None,
                   "moves_examined": None, "budget_exhausted": True, "detail": str(exc)}
            rep = None
        else:
            out = rep.to_dict()
    out["graph"] = fingerprint(g) if g.n <= enumeration.GRAPH_CAP or g.m == g.n - 1 else None
    out["alpha"] = format_scalar(params.alpha)
    _emit(json.dumps(out) + "\n", args.output)
    return EXIT_BUDGET if out["status"] == "budget" else EXIT_OK


def cmd_poa(args) -> int:
    g = _read_graph(args.graph)
    params = GameParams(parse_alpha(args.alpha))
    out = {
        "alpha": format_scalar(params.alpha),
        "n": g.n,
        "social_cost": format_scalar(social_cost(g, params).finite),
        "optimum": format_scalar(social_optimum_cost(g.n, params)),
        "poa": format_scalar(poa(g, params)),
    }
    _emit(json.dumps(out) + "\n", args.output)
    return EXIT_OK


SUITES = ("re-poa-bound", "swap-tree-lemmas", "three-bse-lemmas", "dary-cost-bound", "star-poa-lower")


def _suite_rows(name: str, nmax: int | None, alphas, limits: Limits):
    """Yield (fingerprint, alpha, lemma, subject, lhs, rhs, holds) tuples."""
    if name == "dary-cost-bound":
        for d in (2, 3, 4):
            for n in (7, 15, 31, 40):
                for a in alphas or (1, n, n * math.ceil(math.log2(n))):
                    rep = bounds.verify_dary_cost_bound(d, n, a)
                    for r in rep.rows:
                        yield rep.fingerprint, Fraction(a), r.lemma, r.subject, r.lhs, r.rhs, r.holds
        return
    if name == "star-poa-lower":
        for t in range(3, 8):
            for eta in range(2 * t + 1, 26):
                res = constructions.stretched_tree_star(1, t, eta)
                g = res.graph
                fp = f"tree-star:k=1,t={t},eta={eta}"
                for a in alphas or (1, 2, 5, 10, g.n):
                    params = GameParams(a)
                    lhs = bounds.evaluate_bound("star_poa_lower", n=g.n, k=1, t=t, alpha=a)
                    rhs = poa(g, params)
                    yield fp, params.alpha, "star_poa_lower", f"n={g.n}", lhs, rhs, bounds.leq(lhs, rhs)
        return
    if name == "re-poa-bound":
        graphs = (g for n in range(2, (nmax or 6) + 1) for g in enumeration.enumerate_graphs(n))
        grid = alphas or (1, 2, 5)
        verifier = bounds.verify_re_poa_bound
    elif name == "swap-tree-lemmas":
        graphs = (g for n in range(2, (nmax or 9) + 1) for g in enumeration.enumerate_free_trees(n))
        grid = alphas or (1, 2, 4, 8)
        verifier = bounds.verify_swap_tree_lemmas
    elif name == "three-bse-lemmas":
        graphs = (g for n in range(2, (nmax or 9) + 1) for g in enumeration.enumerate_free_trees(n))
        grid = alphas or (1, 2, 5, 10)
        verifier = bounds.verify_three_bse_lemmas
    else:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    for g in graphs:
        for a in grid:
            params = GameParams(a)
            try:
                rep = verifier(g, params, limits)
            except bounds.PreconditionError:
                yield fingerprint(g), params.alpha, "precondition", "graph", "", "", "skip"
                continue
            for r in rep.rows:
                yield rep.fingerprint, params.alpha, r.lemma, r.subject, r.lhs, r.rhs, r.holds


def cmd_verify(args) -> int:
    if args.nmax is not None:
        _check_nmax(args.nmax, args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["fingerprint", "alpha", "lemma", "subject", "lhs", "rhs", "holds"])
    failures = 0
    for fp, a, lemma, subject, lhs, rhs, holds in _suite_rows(args.suite, args.nmax, _alphas(args.alphas), _limits(args)):
        if holds is False:
            failures += 1
        if holds == "skip":
            w.writerow([fp, format_scalar(a), lemma, subject, "", "", "precondition-skip"])
        else:
            w.writerow([fp, format_scalar(a), lemma, subject, _fmt(lhs), _fmt(rhs), "true" if holds else "false"])
    _emit(buf.getvalue(), args.output)
    if failures:
        print(f"{failures} violated inequalities", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_atlas(args) -> int:
    _check_nmax(args.nmax, args)
    concepts = [c.strip() for c in args.concepts.split(",")] if args.concepts else list(atlas.DEFAULT_CONCEPTS)
    concepts = [str(parse_concept(c)) for c in concepts]
    rows = list(
        atlas.classify_all(
            args.nmax,
            _alphas(args.alphas),
            concepts,
            _limits(args),
            n_min=args.nmin,
            trees_only=args.trees,
            bse_max_n=args.bse_max_n,
            workers=_workers(args),
        )
    )
    _emit(atlas.rows_to_csv(rows, concepts), args.output)
    violations = sum(len(atlas.hierarchy_violations(r.status)) for r in rows)
    if violations:
        print(f"{violations} hierarchy violations", file=sys.stderr)
        return EXIT_VIOLATION
    if any("B" in r.status.values() for r in rows):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_witness(args) -> int:
    _check_nmax(args.nmax, args)
    q = atlas.WitnessQuery(
        tuple(c for c in args.inside.split(",") if c),
        tuple(c for c in (args.outside or "").split(",") if c),
        args.nmax,
        tuple(_alphas(args.alphas)) if args.alphas else None,
        tree_only=args.trees,
    )
    res = atlas.find_witness(q, _limits(args))
    _emit(json.dumps(res.to_dict()) + "\n", args.output)
    if not res.found and res.budget_hits:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_dynamics(args) -> int:
    g = _read_graph(args.graph)
    params = GameParams(parse_alpha(args.alpha))
    res = atlas.run_dynamics(g, params, args.concept, args.policy, args.max_steps, _limits(args))
    _emit(json.dumps(res.to_dict()) + "\n", args.output)
    return EXIT_BUDGET if res.status == "budget" else EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--bne-cap", type=int, default=2**24, help="neighbourhood candidates per centre")
    common.add_argument("--coalition-cap", type=int, default=20_000_000, help="coalition candidates per check")
    common.add_argument("--enum-cap", type=int, default=enumeration.GRAPH_CAP, help="largest n to enumerate")
    common.add_argument("--table-max-n", type=int, default=6, help="use the target table up to this n")
    common.add_argument("--literal-m", action="store_true", help="charge M = alpha*n^3+1 per unreachable node")
    common.add_argument("--workers", type=int, default=1)

    p = argparse.ArgumentParser(prog="bncg", description="Bilateral network creation game toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="build a named graph family")
    s.add_argument("family", help="|".join(f.replace("_", "-") for f in constructions.FAMILIES))
    s.add_argument("--n", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--t", type=Fraction)
    s.add_argument("--eta", type=int)
    s.add_argument("--arity", type=int)
    s.add_argument("--format", choices=("edgelist", "json"), default="edgelist")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("check", parents=[common], help="decide stability of a graph")
    s.add_argument("graph", help="edge-list or JSON file, '-' for stdin")
    s.add_argument("--concept", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--assignment", help="JSON list of [u, v, owner] for unilateral concepts")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("poa", parents=[common], help="price of anarchy of a graph")
    s.add_argument("graph")
    s.add_argument("--alpha", required=True)
    s.set_defaults(func=cmd_poa)

    s = sub.add_parser("verify", parents=[common], help="run an inequality sweep, CSV out")
    s.add_argument("--suite", required=True, choices=SUITES)
    s.add_argument("--nmax", type=int)
    s.add_argument("--alphas", help="comma-separated alpha grid")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("atlas", parents=[common], help="classify all small graphs, CSV out")
    s.add_argument("--nmax", type=int, required=True)
    s.add_argument("--nmin", type=int, default=1)
    s.add_argument("--alphas")
    s.add_argument("--concepts")
    s.add_argument("--trees", action="store_true")
    s.add_argument("--bse-max-n", type=int, default=atlas.BSE_MAX_N)
    s.set_defaults(func=cmd_atlas)

    s = sub.add_parser("witness", parents=[common], help="search a separating example")
    s.add_argument("--in", dest="inside", required=True, help="concepts that must be stable")
    s.add_argument("--out", dest="outside", help="concepts that must be unstable")
    s.add_argument("--nmax", type=int, required=True)
    s.add_argument("--alphas")
    s.add_argument("--trees", action="store_true")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("dynamics", parents=[common], help="run improving-move dynamics")
    s.add_argument("graph")
    s.add_argument("--concept", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--policy", choices=("first", "best"), default="first")
    s.add_argument("--max-steps", type=int, default=1000)
    s.set_defaults(func=cmd_dynamics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (
        InputError,
        GraphError,
        ConstructionError,
        EnumerationCapExceeded,
        AssignmentError,
        DisconnectedGraphError,
        bounds.BoundDomainError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
