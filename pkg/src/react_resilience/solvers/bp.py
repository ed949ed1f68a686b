"""Gossip-partitioned min-sum belief propagation.

The sum objective  sum_i Phi_i(x_i) + sum_(i,j) Psi_ij(x_i, x_j)  is put on a
factor graph (one variable per node, one pairwise factor per edge). Each round
splits the factors into a random spanning forest plus the leftover "frontier"
factors, folds the frontier into the unary terms at the current coloring, and
solves every tree exactly with two-pass min-sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..projection import ProjectionGraph
from .objectives import sum_surrogate


@dataclass(frozen=True, eq=False)
class FactorGraph:
    """Pairwise factor graph. Factor ``f`` joins variables ``fu[f] < fv[f]`` with
    table ``fw[f] * interference`` indexed ``[x_fu, x_fv]``."""

    unary: np.ndarray          # (n_vars, K) variable potentials Phi
    fu: np.ndarray
    fv: np.ndarray
    fw: np.ndarray
    interference: np.ndarray   # (K, K)

    @property
    def n_vars(self) -> int:
        return self.unary.shape[0]

    @property
    def n_factors(self) -> int:
        return self.fu.shape[0]

    @property
    def n_links(self) -> int:
        return 2 * self.n_factors

    def psi(self, f: int) -> np.ndarray:
        return self.fw[f] * self.interference

    def energy(self, x) -> float:
        x = np.asarray(x)
        unary = self.unary[np.arange(self.n_vars), x].sum()
        pair = (self.fw * self.interference[x[self.fu], x[self.fv]]).sum()
        return float(unary + pair)


def build_factor_graph(graph: ProjectionGraph) -> FactorGraph:
    iu, ju, w = graph.edge_arrays()
    unary = graph.node_inherent[:, None] * graph.color_inherent[None, :]
    return FactorGraph(unary=unary, fu=iu, fv=ju, fw=w, interference=graph.interference)


@dataclass(frozen=True)
class Partition:
    trees: list[tuple[np.ndarray, np.ndarray]]   # (variables, factor ids) per tree
    frontier: np.ndarray                          # factor ids left out of every tree


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def gossip_partition(fg: FactorGraph, seed) -> Partition:
    """Visit factors in a seeded random order and admit each one (with both of
    its links) unless it would close a cycle; the rest form the frontier."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(fg.n_factors)
    ds = _DisjointSet(fg.n_vars)
    fu, fv = fg.fu.tolist(), fg.fv.tolist()
    admitted, frontier = [], []
    for f in order.tolist():
        (admitted if ds.union(fu[f], fv[f]) else frontier).append(f)
    roots = np.array([ds.find(i) for i in range(fg.n_vars)], dtype=int)
    admitted = np.array(sorted(admitted), dtype=int)
    froots = roots[fg.fu[admitted]] if admitted.size else np.zeros(0, dtype=int)
    trees = []
    for r in np.unique(roots):
        trees.append((np.flatnonzero(roots == r), admitted[froots == r]))
    return Partition(trees=trees, frontier=np.array(sorted(frontier), dtype=int))


class CyclicInput(ValueError):
    pass


def min_sum_tree(unary: np.ndarray, fu, fv, tables, rng: np.random.Generator | None = None,
                 perturbation: float = 1e-12) -> np.ndarray:
    """Exact minimizer of sum(unary[i, x_i]) + sum(tables[f][x_fu, x_fv]) on a forest.

    Messages flow leaf to root, then the assignment is read back root to leaf.
    With ``rng`` every potential gets a uniform nudge below ``perturbation`` so
    the minimizer is unique; otherwise ties go to the lowest color.
    """
    unary = np.array(unary, dtype=float)
    n, k = unary.shape
    fu, fv = np.asarray(fu, dtype=int), np.asarray(fv, dtype=int)
    tables = [np.asarray(t, dtype=float) for t in tables]
    if rng is not None and perturbation > 0:
        unary = unary + rng.random(unary.shape) * perturbation
        tables = [t + rng.random(t.shape) * perturbation for t in tables]

    ds = _DisjointSet(n)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for f, (a, b) in enumerate(zip(fu.tolist(), fv.tolist())):
        if a == b or not ds.union(a, b):
            raise CyclicInput("factor graph restricted to these factors is not a forest")
        adj[a].append((b, f))
        adj[b].append((a, f))

    order: list[int] = []
    parent = [-1] * n
    via = [-1] * n
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            u = stack.pop()
            order.append(u)
            for w, f in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w], via[w] = u, f
                    stack.append(w)

    belief = unary.copy()
    choice: dict[int, np.ndarray] = {}
    for u in reversed(order):
        p = parent[u]
        if p < 0:
            continue
        t = tables[via[u]]
        # orient the table as [x_u, x_p]
        t = t if fu[via[u]] == u else t.T
        total = belief[u][:, None] + t
        choice[u] = np.argmin(total, axis=0)
        belief[p] += total.min(axis=0)

    x = np.zeros(n, dtype=int)
    for u in order:
        p = parent[u]
        x[u] = int(np.argmin(belief[u])) if p < 0 else int(choice[u][x[p]])
    return x


def gpbp(graph: ProjectionGraph, rounds: int = 10, seed: int = 0, trace: list | None = None) -> np.ndarray:
    """Round-based tree min-sum with frontier folding; keeps the best coloring
    under the sum objective, starting from the graph's current coloring.

    Frontier factors are folded at the previous round's colors, so on dense
    graphs every node reacts to the same stale picture and the joint update
    tends to overshoot. When the full update does not improve, a random half
    of the changed variables is tried, then a quarter, and so on.
    """
    fg = build_factor_graph(graph)
    colors = graph.colors.copy()
    best = sum_surrogate(graph, colors)
    if trace is not None:
        trace.append(best)
    if graph.color_count == 1 or graph.n == 0:
        return colors
    interference = fg.interference
    for child in np.random.SeedSequence(seed).spawn(rounds):
        part_seed, noise_seed, damp_seed = child.spawn(3)
        part = gossip_partition(fg, part_seed)
        unary = fg.unary.copy()
        fr = part.frontier
        if fr.size:
            u, v, w = fg.fu[fr], fg.fv[fr], fg.fw[fr]
            np.add.at(unary, u, w[:, None] * interference[:, colors[v]].T)
            np.add.at(unary, v, w[:, None] * interference[colors[u], :])
        keep = np.ones(fg.n_factors, dtype=bool)
        keep[fr] = False
        tree_f = np.flatnonzero(keep)
        tables = [fg.fw[f] * interference for f in tree_f.tolist()]
        new = min_sum_tree(unary, fg.fu[tree_f], fg.fv[tree_f], tables, rng=np.random.default_rng(noise_seed))
        damp = np.random.default_rng(damp_seed)
        changed = np.flatnonzero(new != colors)
        while changed.size:
            cand = colors.copy()
            cand[changed] = new[changed]
            val = sum_surrogate(graph, cand)
            if val < best:
                colors, best = cand, val
                break
            changed = damp.choice(changed, changed.size // 2, replace=False)
        if trace is not None:
            trace.append(best)
    return colors
