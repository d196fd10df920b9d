"""Move shapes, their application to graphs, and the canonical move order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .graph import Graph, _norm


class MoveNotApplicable(ValueError):
    """A deletion refers to a missing edge or an addition to a present one."""


def _edges(es) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(_norm(u, v) for u, v in es))


@dataclass(frozen=True)
class RemoveEdge:
    """``agent`` deletes its edge to ``partner``; only ``agent`` is consulted."""

    agent: int
    partner: int
    shape = "remove"

    def sort_key(self):
        return (0, self.agent, self.partner)

    def changes(self):
        return [_norm(self.agent, self.partner)], []

    def consulted(self) -> tuple[int, ...]:
        return (self.agent,)


@dataclass(frozen=True)
class AddEdge:
    """Bilateral addition of ``uv``; both endpoints pay and are consulted."""

    u: int
    v: int
    shape = "add"

    def __post_init__(self) -> None:
        if self.u > self.v:
            a, b = self.v, self.u
            object.__setattr__(self, "u", a)
            object.__setattr__(self, "v", b)

    def sort_key(self):
        return (1, self.u, self.v)

    def changes(self):
        return [], [(self.u, self.v)]

    def consulted(self):
        return (self.u, self.v)


@dataclass(frozen=True)
class BuyEdge:
    """Unilateral purchase: ``agent`` alone pays for the edge to ``partner``."""

    agent: int
    partner: int
    shape = "buy"

    def sort_key(self):
        return (1, self.agent, self.partner)

    def changes(self):
        return [], [_norm(self.agent, self.partner)]

    def consulted(self):
        return (self.agent,)


@dataclass(frozen=True)
class Swap:
    """``u`` replaces its edge to ``v`` by a new edge to ``w``."""

    u: int
    v: int
    w: int
    shape = "swap"

    def sort_key(self):
        return (2, self.u, self.v, self.w)

    def changes(self):
        return [_norm(self.u, self.v)], [_norm(self.u, self.w)]

    def consulted(self):
        return (self.u, self.w)


@dataclass(frozen=True)
class NeighborhoodChange:
    """``center`` drops edges to ``removed`` and links to every node of ``added``."""

    center: int
    removed: tuple[int, ...]
    added: tuple[int, ...]
    shape = "neighborhood"

    def __post_init__(self) -> None:
        object.__setattr__(self, "removed", tuple(sorted(self.removed)))
        object.__setattr__(self, "added", tuple(sorted(self.added)))

    def sort_key(self):
        return (3, self.center, self.removed, self.added)

    def changes(self):
        c = self.center
        return [_norm(c, x) for x in self.removed], [_norm(c, x) for x in self.added]

    def consulted(self):
        return (self.center,) + self.added


@dataclass(frozen=True)
class CoalitionChange:
    """Joint change by ``coalition``: delete ``removed`` and create ``added``."""

    coalition: tuple[int, ...]
    removed: tuple[tuple[int, int], ...]
    added: tuple[tuple[int, int], ...]
    shape = "coalition"

    def __post_init__(self) -> None:
        object.__setattr__(self, "coalition", tuple(sorted(self.coalition)))
        object.__setattr__(self, "removed", _edges(self.removed))
        object.__setattr__(self, "added", _edges(self.added))

    def sort_key(self):
        return (4, len(self.coalition), self.coalition, self.removed, self.added)

    def changes(self):
        return list(self.removed), list(self.added)

    def consulted(self):
        return self.coalition


@dataclass(frozen=True)
class StrategyChange:
    """Unilateral game: ``agent`` replaces the set of edges it owns by ``strategy``."""

    agent: int
    strategy: tuple[int, ...]
    shape = "strategy"

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", tuple(sorted(self.strategy)))

    def sort_key(self):
        return (5, self.agent, self.strategy)

    def consulted(self):
        return (self.agent,)


Move = Union[RemoveEdge, AddEdge, BuyEdge, Swap, NeighborhoodChange, CoalitionChange, StrategyChange]


def validate_move(g: Graph, move) -> None:
    """Raise :class:`MoveNotApplicable` unless ``move`` is well formed on ``g``."""
    if isinstance(move, StrategyChange):
        raise MoveNotApplicable("strategy changes need an edge assignment, see equilibria.apply_strategy")
    for x in _nodes(move):
        if not 0 <= x < g.n:
            raise MoveNotApplicable(f"node {x} outside [0, {g.n})")
    removed, added = move.changes()
    for e in removed:
        if e not in g.edges:
            raise MoveNotApplicable(f"edge {e} to delete is absent")
    for u, v in added:
        if u == v:
            raise MoveNotApplicable("self-loop")
        if (u, v) in g.edges:
            raise MoveNotApplicable(f"edge {(u, v)} to add is already present")
    if not removed and not added:
        raise MoveNotApplicable("empty move")
    if isinstance(move, Swap) and move.w in (move.u, move.v):
        raise MoveNotApplicable("swap target must differ from both endpoints")
    if isinstance(move, CoalitionChange):
        members = set(move.coalition)
        for u, v in move.removed:
            if u not in members and v not in members:
                raise MoveNotApplicable(f"deleted edge {(u, v)} does not meet the coalition")
        for u, v in move.added:
            if u not in members or v not in members:
                raise MoveNotApplicable(f"added edge {(u, v)} leaves the coalition")
    if isinstance(move, NeighborhoodChange) and move.center in move.added:
        raise MoveNotApplicable("center cannot link to itself")


def _nodes(move) -> list[int]:
    if isinstance(move, CoalitionChange):
        return list(move.coalition) + [x for e in move.removed + move.added for x in e]
    removed, added = move.changes()
    return [x for e in removed + added for x in e]


def apply_move(g: Graph, move) -> Graph:
    validate_move(g, move)
    removed, added = move.changes()
    return Graph(g.n, (g.edges - set(removed)) | set(added))


def move_to_dict(move) -> dict:
    out: dict = {"shape": move.shape}
    if isinstance(move, (RemoveEdge, BuyEdge)):
        out.update(agent=move.agent, partner=move.partner)
    elif isinstance(move, AddEdge):
        out.update(u=move.u, v=move.v)
    elif isinstance(move, Swap):
        out.update(u=move.u, v=move.v, w=move.w)
    elif isinstance(move, NeighborhoodChange):
        out.update(center=move.center, removed=list(move.removed), added=list(move.added))
    elif isinstance(move, CoalitionChange):
        out.update(
            coalition=list(move.coalition),
            removed=[list(e) for e in move.removed],
            added=[list(e) for e in move.added],
        )
    elif isinstance(move, StrategyChange):
        out.update(agent=move.agent, strategy=list(move.strategy))
    return out
