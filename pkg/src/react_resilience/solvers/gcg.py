"""Graph coloring game baseline: best-response dynamics restricted to proper colorings."""

from __future__ import annotations

import numpy as np

from ..projection import ProjectionGraph


class PaletteTooSmall(ValueError):
    pass


def local_costs(graph: ProjectionGraph, colors: np.ndarray, v: int) -> np.ndarray:
    """Sum-objective terms touching ``v`` for every candidate color of ``v``."""
    nb = graph.neighbors()[v]
    w = graph.weights[v, nb]
    hi = nb > v  # factor (v, u): table indexed [x_v, x_u]
    interference = graph.interference
    cost = graph.node_inherent[v] * graph.color_inherent
    cost = cost + interference[:, colors[nb[hi]]] @ w[hi]
    cost = cost + w[~hi] @ interference[colors[nb[~hi]], :]
    return cost


def gcg(graph: ProjectionGraph, rng: np.random.Generator, max_sweeps: int = 1000) -> np.ndarray:
    """Greedy proper start in random order, then nodes (in random order each
    sweep) switch to the cheapest color unused by their neighbors until no node
    can strictly improve."""
    n, k = graph.n, graph.color_count
    if n == 0:
        return np.zeros(0, dtype=int)
    need = int(graph.degree().max()) + 1
    if k < need:
        raise PaletteTooSmall(f"proper coloring game needs at least {need} colors, palette has {k}")
    nbrs = graph.neighbors()
    colors = np.full(n, -1, dtype=int)
    for v in rng.permutation(n):
        taken = np.zeros(k, dtype=bool)
        nc = colors[nbrs[v]]
        taken[nc[nc >= 0]] = True
        colors[v] = int(np.argmin(taken))
    for _ in range(max_sweeps):
        changed = False
        for v in rng.permutation(n):
            cost = local_costs(graph, colors, v)
            cost[colors[nbrs[v]]] = np.inf
            c = int(np.argmin(cost))
            if cost[c] < cost[colors[v]]:
                colors[v] = c
                changed = True
        if not changed:
            break
    return colors
