"""Sequential greedy colorings: the interference-aware TSC-DSATUR and the
classic proper-coloring baselines (DSATUR, Welsh-Powell)."""

from __future__ import annotations

import numpy as np

from ..projection import ProjectionGraph


def tsc_dsatur(graph: ProjectionGraph, rng: np.random.Generator | None = None) -> np.ndarray:
    """Saturation-ordered greedy coloring that minimizes local interference.

    Picks the uncolored vertex with the most colored neighbors, then the
    highest degree, then a random one among those; assigns the color with the
    smallest weighted interference from its colored neighbors (lowest index on ties).
    """
    rng = rng or np.random.default_rng(0)
    n, k = graph.n, graph.color_count
    colors = np.full(n, -1, dtype=int)
    if n == 0:
        return colors
    w = np.where(graph.adjacency, graph.weights, 0.0)
    interference = graph.interference
    nbrs = graph.neighbors()
    deg = graph.degree()
    sat = np.zeros(n, dtype=int)
    cost = np.zeros((n, k))
    open_ = np.ones(n, dtype=bool)
    for _ in range(n):
        cand = np.flatnonzero(open_)
        s = sat[cand]
        cand = cand[s == s.max()]
        d = deg[cand]
        cand = cand[d == d.max()]
        v = int(cand[0]) if cand.size == 1 else int(rng.choice(cand))
        c = int(np.argmin(cost[v]))
        colors[v] = c
        open_[v] = False
        nb = nbrs[v]
        sat[nb] += 1
        cost[nb] += w[v, nb][:, None] * interference[c][None, :]
    return colors


def _first_fit(graph: ProjectionGraph, order) -> np.ndarray:
    n = graph.n
    colors = np.full(n, -1, dtype=int)
    seen = np.zeros((n, n + 1), dtype=bool)  # seen[v, c]: a neighbor of v holds c
    nbrs = graph.neighbors()
    for v in order:
        c = int(np.argmin(seen[v]))
        colors[v] = c
        seen[nbrs[v], c] = True
    return colors


def welsh_powell(graph: ProjectionGraph) -> np.ndarray:
    """Proper coloring: vertices by descending degree, first feasible color.

    Filling color classes one at a time in this order gives the same result as
    first-fit along it, which is what is computed.
    """
    order = np.argsort(-graph.degree(), kind="stable")
    return _first_fit(graph, order)


def dsatur_proper(graph: ProjectionGraph) -> np.ndarray:
    """Classic DSATUR: most distinct neighbor colors first, then degree, then index."""
    n = graph.n
    colors = np.full(n, -1, dtype=int)
    seen = np.zeros((n, n + 1), dtype=bool)
    nbrs = graph.neighbors()
    deg = graph.degree()
    open_ = np.ones(n, dtype=bool)
    sat = np.zeros(n, dtype=int)
    for _ in range(n):
        cand = np.flatnonzero(open_)
        s = sat[cand]
        cand = cand[s == s.max()]
        d = deg[cand]
        v = int(cand[np.argmax(d)])
        c = int(np.argmin(seen[v]))
        colors[v] = c
        open_[v] = False
        nb = nbrs[v]
        fresh = nb[~seen[nb, c]]
        seen[fresh, c] = True
        sat[fresh] += 1
    return colors


def colors_used(colors) -> int:
    colors = np.asarray(colors)
    return int(colors.max()) + 1 if colors.size else 0


def is_proper(graph: ProjectionGraph, colors) -> bool:
    colors = np.asarray(colors)
    iu, ju, _ = graph.edge_arrays()
    return bool(np.all(colors[iu] != colors[ju]))
