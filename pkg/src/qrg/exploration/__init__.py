"""Breadth-first exploration of the graph and the walks read off it."""
from .dominating import (DominatingWalk, FreeWalk, dominating_from_xi, free_walk,
                         offspring_mean, overcount_walk)
from .lazy import Arc, LazyExplorer, clipped_interval, explore_lazy
from .replay import explore_realization
from .walk import (ComponentSpan, WalkPath, component_stats, expected_first_eta, free_count,
                   rescale_walk, visit_counts, walk_from_eta)

__all__ = [
    "Arc", "ComponentSpan", "DominatingWalk", "FreeWalk", "LazyExplorer", "WalkPath",
    "clipped_interval", "component_stats", "dominating_from_xi", "expected_first_eta",
    "explore_lazy", "explore_realization", "free_count", "free_walk", "offspring_mean",
    "overcount_walk", "rescale_walk", "visit_counts", "walk_from_eta",
]
