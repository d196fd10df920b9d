"""Exact equilibrium checks for the bilateral network creation game."""

from .game import ExtendedCost, GameParams, agent_cost, parse_alpha, poa, social_cost, social_optimum_cost
from .graph import Graph, diameter, distances_from, is_connected, one_medians, total_distance, tree_view
from .equilibria import Limits, StabilityReport, check_stability, improving_moves, verify_witness

__all__ = [
    "ExtendedCost",
    "GameParams",
    "Graph",
    "Limits",
    "StabilityReport",
    "agent_cost",
    "check_stability",
    "diameter",
    "distances_from",
    "improving_moves",
    "is_connected",
    "one_medians",
    "parse_alpha",
    "poa",
    "social_cost",
    "social_optimum_cost",
    "total_distance",
    "tree_view",
    "verify_witness",
]
