"""Exact cost semantics: agent cost, social cost, optimum and price of anarchy."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .graph import Graph, bfs_profile, is_connected


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ExtendedCost:
    """Lexicographic pair: number of unreachable nodes, then the finite part.

    A cost with fewer unreachable nodes is always smaller, whatever the finite
    parts are.  Differences of costs are ExtendedCosts too, with signed fields.
    """

    unreachable: int
    finite: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "finite", Fraction(self.finite))

    def __add__(self, other: "ExtendedCost") -> "ExtendedCost":
        return ExtendedCost(self.unreachable + other.unreachable, self.finite + other.finite)

    def __sub__(self, other: "ExtendedCost") -> "ExtendedCost":
        return ExtendedCost(self.unreachable - other.unreachable, self.finite - other.finite)

    def __neg__(self) -> "ExtendedCost":
        return ExtendedCost(-self.unreachable, -self.finite)

    def is_negative(self) -> bool:
        return self < ZERO

    def literal(self, m: Fraction) -> Fraction:
        """Collapse to one number, charging ``m`` per unreachable node."""
        return self.finite + m * self.unreachable

    def to_list(self) -> list:
        return [self.unreachable, format_scalar(self.finite)]

    def __str__(self) -> str:
        return f"({self.unreachable}, {format_scalar(self.finite)})"


ZERO = ExtendedCost(0, Fraction(0))


def parse_alpha(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, an integer or a decimal string exactly."""
    if isinstance(text, (Fraction, int)):
        value = Fraction(text)
    elif isinstance(text, Rational):
        value = Fraction(text.numerator, text.denominator)
    else:
        if isinstance(text, float):
            raise TypeError("pass alpha as a string or Fraction, not a float")
        try:
            value = Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse {text!r} as an exact rational") from None
    if value <= 0:
        raise ValueError(f"alpha must be positive, got {value}")
    return value


def format_scalar(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class GameParams:
    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))

    def literal_m(self, n: int) -> Fraction:
        """The sentinel distance ``alpha * n**3 + 1``."""
        return self.alpha * n**3 + 1


def agent_cost(g: Graph, p: GameParams, u: int) -> ExtendedCost:
    """``alpha * deg(u) + sum of distances``, unreachable nodes counted apart."""
    g._check_node(u)
    unreach, dist = bfs_profile(g.adjacency, u)
    return ExtendedCost(unreach, p.alpha * g.degree(u) + dist)


def social_cost(g: Graph, p: GameParams) -> ExtendedCost:
    total = ZERO
    for u in range(g.n):
        total = total + agent_cost(g, p, u)
    return total


def social_optimum_cost(n: int, p: GameParams) -> Fraction:
    """Minimum social cost over all graphs on ``n`` nodes (star or clique)."""
    if n < 1:
        raise ValueError("need n >= 1")
    a = p.alpha
    star = 2 * (n - 1) * (a + n - 1)
    clique = n * (n - 1) * (1 + a)
    if a == 1:
        assert star == clique
    return Fraction(star if a >= 1 else clique)


def poa(g: Graph, p: GameParams) -> Fraction:
    """Social cost divided by the optimum; connected graphs with n >= 2 only."""
    if g.n < 2:
        raise ValueError("price of anarchy needs at least two nodes")
    if not is_connected(g):
        raise DisconnectedGraphError("price of anarchy is undefined for disconnected graphs")
    return social_cost(g, p).finite / social_optimum_cost(g.n, p)


def cost_delta(g: Graph, p: GameParams, u: int, move) -> ExtendedCost:
    """Change of ``u``'s cost when ``move`` is applied to ``g``."""
    from .moves import apply_move

    return agent_cost(apply_move(g, move), p, u) - agent_cost(g, p, u)
