"""Attack-path probabilities and post-breach risk.

Path scores are accumulated as sums of log factors in path order, so every
evaluator here (per-target branch-and-bound, exhaustive oracle, single-source
search) produces the same float for the same path. Reported probabilities are
re-exponentiated at the end.

Contagion modes for the network-spread projection: ``"min"`` takes, for the step
into a node, the minimum similarity between its configuration and every
configuration already traversed; ``"max"`` takes the maximum instead.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .model import Scenario, asset_diameter
from .projection import ProjectionGraph, ProjectionKind, build_projection

# Bounds are compared with this slack so that rounding in precomputed bounds
# can only cost ~1e-13 in log-probability, never a real improvement.
MARGIN = 1e-13
CONTAGION_MODES = ("min", "max")


class GraphTooLarge(ValueError):
    pass


class AttackResult(NamedTuple):
    probability: float
    path: tuple[int, ...]
    exact: bool = True

    @property
    def log_probability(self) -> float:
        return math.log(self.probability) if self.probability > 0 else -math.inf


def _check_mode(contagion: str) -> None:
    if contagion not in CONTAGION_MODES:
        raise ValueError(f"contagion must be one of {CONTAGION_MODES}, got {contagion!r}")


def _colors(graph: ProjectionGraph, colors) -> np.ndarray:
    return graph.colors if colors is None else np.asarray(colors, dtype=int)


def _agg(contagion: str):
    return np.minimum if contagion == "min" else np.maximum


# -- single path -----------------------------------------------------------------


def path_log_probability(path: Sequence[int], graph: ProjectionGraph, contagion: str = "min", colors=None) -> float:
    """Log of the attack probability of ``path`` (component ids, source first)."""
    _check_mode(contagion)
    if len(path) == 0:
        raise ValueError("attack path needs at least the source node")
    if len(set(path)) != len(path):
        raise ValueError("attack path repeats a node")
    idx = graph.index
    try:
        pos = [idx[c] for c in path]
    except KeyError as exc:
        raise ValueError(f"unknown node {exc.args[0]}") from None
    col = _colors(graph, colors)
    lw, li = graph.log_weights(), graph.log_interference()
    total = 0.0
    if graph.kind is ProjectionKind.NETWORK:
        agg = _agg(contagion)
        prof = li[col[pos[0]]]
        for a, b in zip(pos, pos[1:]):
            if not graph.adjacency[a, b]:
                raise ValueError(f"nodes {graph.nodes[a]} and {graph.nodes[b]} are not adjacent")
            total = total + (lw[a, b] + prof[col[b]])
            prof = agg(prof, li[col[b]])
    else:
        for a, b in zip(pos, pos[1:]):
            if not graph.adjacency[a, b]:
                raise ValueError(f"nodes {graph.nodes[a]} and {graph.nodes[b]} are not adjacent")
            total = total + (lw[a, b] + li[col[a], col[b]])
    return float(total)


def path_probability(path: Sequence[int], graph: ProjectionGraph, contagion: str = "min", colors=None) -> float:
    return math.exp(path_log_probability(path, graph, contagion, colors))


# -- exhaustive oracle --------------------------------------------------------------


def brute_force_max_probability(graph: ProjectionGraph, source: int, target: int, *,
                                max_nodes: int = 12, contagion: str = "min", colors=None) -> AttackResult:
    """Enumerate every loopless source->target path and return the best one."""
    _check_mode(contagion)
    if graph.n > max_nodes:
        raise GraphTooLarge(f"oracle limited to {max_nodes} nodes, graph has {graph.n}")
    idx = graph.index
    s, t = idx[source], idx[target]
    if s == t:
        raise ValueError("source and target must differ")
    col = _colors(graph, colors)
    lw, li = graph.log_weights(), graph.log_interference()
    network = graph.kind is ProjectionKind.NETWORK
    agg = _agg(contagion)
    nbrs = graph.neighbors()
    best = [-math.inf, ()]

    def visit(u, total, prof, path, seen):
        for w in nbrs[u]:
            w = int(w)
            if w in seen:
                continue
            cont = prof[col[w]] if network else li[col[u], col[w]]
            nxt = total + (lw[u, w] + cont)
            if w == t:
                if nxt > best[0]:
                    best[0], best[1] = nxt, path + (w,)
                continue
            seen.add(w)
            visit(w, nxt, agg(prof, li[col[w]]) if network else prof, path + (w,), seen)
            seen.discard(w)

    visit(s, 0.0, li[col[s]], (s,), {s})
    logp, path = best
    if logp == -math.inf:
        return AttackResult(0.0, ())
    return AttackResult(math.exp(logp), tuple(graph.nodes[i] for i in path))


# -- per-target branch and bound -------------------------------------------------------


def _completion_bound(graph: ProjectionGraph, t: int, col: np.ndarray, contagion: str) -> np.ndarray:
    """Best local-product log value from every node to ``t``.

    For a step u->w the contagion factor is bounded by its local value
    (network/min, config) or by the largest similarity into w's color among
    colors present (network/max).
    """
    lw, li = graph.log_weights(), graph.log_interference()
    if graph.kind is ProjectionKind.NETWORK and contagion == "max":
        present = np.unique(col)
        colmax = li[present].max(axis=0)
        step = lw + colmax[col][None, :]
    else:
        step = lw + li[np.ix_(col, col)]
    dist = np.full(graph.n, math.inf)
    dist[t] = 0.0
    heap = [(0.0, t)]
    nbrs = graph.neighbors()
    while heap:
        d, w = heapq.heappop(heap)
        if d > dist[w]:
            continue
        for u in nbrs[w]:
            nd = d - step[u, w]
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, int(u)))
    return -dist


def max_attack_probability(graph: ProjectionGraph, source: int, target: int, *, max_hops: int | None = None,
                           contagion: str = "min", colors=None) -> AttackResult:
    """Highest-probability loopless attack path from ``source`` to ``target``.

    Best-first branch and bound: a partial path is dropped once its score plus
    the optimistic completion bound cannot beat the incumbent. With
    ``max_hops`` the search is truncated and ``exact`` reports whether the cap
    could have hidden a better path.
    """
    _check_mode(contagion)
    idx = graph.index
    s, t = idx[source], idx[target]
    if s == t:
        raise ValueError("source and target must differ")
    col = _colors(graph, colors)
    lw, li = graph.log_weights(), graph.log_interference()
    network = graph.kind is ProjectionKind.NETWORK
    agg = _agg(contagion)
    h = _completion_bound(graph, t, col, contagion)
    nbrs = graph.neighbors()

    incumbent, best_path = -math.inf, ()
    capped = False
    tick = 0
    heap = [(-h[s], tick, 0.0, s, (s,), li[col[s]])]
    while heap:
        negkey, _, g, u, path, prof = heapq.heappop(heap)
        if -negkey <= incumbent + MARGIN or negkey == math.inf:
            break
        for w in nbrs[u]:
            w = int(w)
            if w in path:
                continue
            cont = prof[col[w]] if network else li[col[u], col[w]]
            g2 = g + (lw[u, w] + cont)
            if w == t:
                if g2 > incumbent:
                    incumbent, best_path = g2, path + (w,)
                continue
            if g2 + h[w] <= incumbent + MARGIN or h[w] == -math.inf:
                continue
            if max_hops is not None and len(path) >= max_hops:
                capped = True
                continue
            tick += 1
            heapq.heappush(heap, (-(g2 + h[w]), tick, g2, w, path + (w,), agg(prof, li[col[w]]) if network else prof))
    if incumbent == -math.inf:
        return AttackResult(0.0, (), not capped)
    return AttackResult(math.exp(incumbent), tuple(graph.nodes[i] for i in best_path), not capped)


# -- all targets from one source -----------------------------------------------------------


def _local_risk_logs(graph: ProjectionGraph, s: int, col: np.ndarray) -> np.ndarray:
    """Max-product Dijkstra; exact when each step factor depends only on its edge."""
    cache = graph._cache
    if "csr" not in cache:
        a = csr_matrix(graph.adjacency)
        rows = np.repeat(np.arange(graph.n), np.diff(a.indptr))
        m = csr_matrix((np.zeros(rows.size), a.indices, a.indptr), shape=(graph.n, graph.n))
        cache["csr"] = (m, rows, a.indices.astype(np.int64), graph.log_weights()[rows, a.indices])
    m, rows, cols, lw_data = cache["csr"]
    li = graph.log_interference()
    # the structure is fixed; only the edge costs change with the coloring
    pair = col.take(rows) * li.shape[1] + col.take(cols)
    m.data[:] = -(lw_data + li.ravel().take(pair))
    dist = dijkstra(m, directed=True, indices=s)
    return -dist


def _network_min_risk_logs(graph: ProjectionGraph, s: int, col: np.ndarray) -> np.ndarray:
    """Exact single-source search for the path-dependent (min) contagion rule.

    Labels are (node, log-probability, profile) where the profile holds, for
    each color, the minimum log similarity from any traversed configuration.
    Walks never beat the loopless path obtained by cutting out their cycles, so
    loop checks are unnecessary; a label is expanded only if some target could
    still improve under an admissible bound and no stored label at the same
    node dominates it.
    """
    n = graph.n
    lw, li = graph.log_weights(), graph.log_interference()
    est = graph.best_edge_products()
    nbrs = graph.neighbors()
    best = np.full(n, -np.inf)
    best[s] = 0.0
    open_target = np.ones(n, dtype=bool)
    open_target[s] = False

    def useful(u, p, prof):
        b = p + est[u] + prof[col]
        return bool(np.any((b > best + MARGIN) & open_target))

    stored: list[list[tuple[float, np.ndarray]]] = [[] for _ in range(n)]
    tick = 0
    heap = [(-0.0, tick, s, li[col[s]])]
    while heap:
        negp, _, u, prof = heapq.heappop(heap)
        p = -negp
        if any(q >= p and np.all(qp >= prof) for q, qp in stored[u]):
            continue
        if not useful(u, p, prof):
            continue
        stored[u].append((p, prof))
        nb = nbrs[u]
        if nb.size == 0:
            continue
        pw = p + (lw[u, nb] + prof[col[nb]])
        better = pw > best[nb]
        best[nb[better]] = pw[better]
        if not useful(u, p, prof):
            continue
        child = np.minimum(prof[None, :], li[col[nb]])
        bound = pw[:, None] + est[nb] + child[:, col]
        keep = np.any((bound > best[None, :] + MARGIN) & open_target[None, :], axis=1) & np.isfinite(pw)
        for k in np.flatnonzero(keep):
            tick += 1
            heapq.heappush(heap, (-pw[k], tick, int(nb[k]), child[k]))
    return best


def risk_logs(graph: ProjectionGraph, source_pos: int, contagion: str = "min", colors=None) -> np.ndarray:
    """Log worst-case risk of every node (by position) given a breached source position."""
    _check_mode(contagion)
    col = _colors(graph, colors)
    if graph.kind is ProjectionKind.CONFIG:
        out = _local_risk_logs(graph, source_pos, col)
    elif contagion == "min":
        out = _network_min_risk_logs(graph, source_pos, col)
    else:
        out = np.full(graph.n, -np.inf)
        for t in range(graph.n):
            if t != source_pos:
                out[t] = max_attack_probability(graph, graph.nodes[source_pos], graph.nodes[t],
                                                contagion=contagion, colors=col).log_probability
    out[source_pos] = 0.0
    return out


def component_risks(graph: ProjectionGraph, source: int, contagion: str = "min", colors=None) -> dict[int, float]:
    """rho(c | source) for every node; the breached component itself is 1."""
    logs = risk_logs(graph, graph.index[source], contagion, colors)
    return dict(zip(graph.nodes, np.exp(logs).tolist()))


# -- asset aggregation ----------------------------------------------------------------------


@dataclass(frozen=True)
class RiskReport:
    source: int
    component_risks: dict[int, float]
    asset_risks: dict[int, float]
    aggregated: dict[int, float]
    overall: float
    iterations: int
    converged: bool


@dataclass(eq=False)
class AssetAggregator:
    """Array form of the asset-layer recurrence for one scenario.

    ``comp_asset[i]`` is the asset position of component position ``i``;
    ``dep[k, i]`` is the weight of the dependency a_k -> a_i.
    """

    scenario: Scenario
    comp_asset: np.ndarray = field(init=False)
    dep: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)
    diameter: int = field(init=False)

    def __post_init__(self):
        sc = self.scenario
        aidx = sc.asset_index
        self.comp_asset = np.array([aidx[c.asset_id] for c in sc.components], dtype=int)
        na = len(sc.assets)
        dep = np.zeros((na, na))
        for d in sc.asset_deps:
            dep[aidx[d.source], aidx[d.target]] += d.weight
        self.dep = dep
        self.depT = np.ascontiguousarray(dep.T)
        self.weights = np.array([a.weight for a in sc.assets])
        self.diameter = asset_diameter(sc)

    @property
    def default_cap(self) -> int:
        return max(self.diameter, len(self.scenario.assets))

    def asset_vector(self, comp_risk: np.ndarray) -> np.ndarray:
        return np.bincount(self.comp_asset, weights=comp_risk, minlength=len(self.weights))

    def iterate(self, base: np.ndarray, max_iterations: int | None = None) -> tuple[np.ndarray, int, bool]:
        cap = self.default_cap if max_iterations is None else max_iterations
        cur = base
        for t in range(1, cap + 1):
            nxt = base + self.depT @ cur
            if np.array_equal(nxt, cur):
                return nxt, t, True
            cur = nxt
        return cur, cap, False

    def overall(self, comp_risk: np.ndarray, max_iterations: int | None = None) -> float:
        agg, _, _ = self.iterate(self.asset_vector(comp_risk), max_iterations)
        return float(self.weights @ agg)


def aggregate_risk(scenario: Scenario, component_risks: Mapping[int, float], source: int,
                   max_iterations: int | None = None) -> RiskReport:
    """Fold component risks into per-asset and overall risk.

    Runs the dependency recurrence up to ``max(diameter, |assets|)`` times (or
    exactly ``max_iterations`` when given), stopping at the first fixed point.
    """
    agg = AssetAggregator(scenario)
    rho = np.array([component_risks[c.id] for c in scenario.components], dtype=float)
    base = agg.asset_vector(rho)
    final, used, converged = agg.iterate(base, max_iterations)
    ids = [a.id for a in scenario.assets]
    return RiskReport(
        source=source,
        component_risks=dict(component_risks),
        asset_risks=dict(zip(ids, base.tolist())),
        aggregated=dict(zip(ids, final.tolist())),
        overall=float(agg.weights @ final),
        iterations=used,
        converged=converged,
    )


def overall_risk(scenario: Scenario, kind, source: int, edge_floor: float = 0.0, contagion: str = "min") -> float:
    graph = build_projection(scenario, kind, edge_floor)
    return aggregate_risk(scenario, component_risks(graph, source, contagion), source).overall


def risk_ratio(before: float, after: float) -> float:
    if not before > 0:
        raise ZeroDivisionError("risk before reconfiguration must be positive")
    return after / before


@dataclass(eq=False)
class Breach:
    """A compromised component in one scenario, seen through one projection.

    ``risk(colors)`` is the overall risk after recoloring the projection; it is
    the same number ``overall_risk`` yields on the recolored scenario.
    """

    scenario: Scenario
    kind: ProjectionKind
    source: int
    edge_floor: float = 0.0
    contagion: str = "min"
    graph: ProjectionGraph = field(init=False)

    def __post_init__(self):
        self.kind = ProjectionKind.parse(self.kind)
        _check_mode(self.contagion)
        self.graph = build_projection(self.scenario, self.kind, self.edge_floor)
        self.source_pos = self.graph.index[self.source]
        self._agg = AssetAggregator(self.scenario)
        # component order in the scenario equals node order in the projection
        assert self.graph.nodes == tuple(c.id for c in self.scenario.components)

    @classmethod
    def on_graph(cls, scenario: Scenario, graph: ProjectionGraph, source: int, contagion: str = "min",
                 edge_floor: float = 0.0, aggregator: "AssetAggregator | None" = None) -> "Breach":
        """Reuse an already built projection (and aggregator) of ``scenario``."""
        _check_mode(contagion)
        if graph.nodes != tuple(c.id for c in scenario.components):
            raise ValueError("graph does not belong to this scenario")
        self = cls.__new__(cls)
        self.scenario, self.kind, self.source = scenario, graph.kind, source
        self.edge_floor, self.contagion, self.graph = edge_floor, contagion, graph
        self.source_pos = graph.index[source]
        self._agg = aggregator if aggregator is not None else AssetAggregator(scenario)
        return self

    def risk(self, colors=None) -> float:
        col = self.graph.colors if colors is None else colors
        rho = np.exp(risk_logs(self.graph, self.source_pos, self.contagion, col))
        return self._agg.overall(rho)

    def report(self, colors=None) -> RiskReport:
        g = self.graph if colors is None else self.graph.with_colors(colors)
        return aggregate_risk(self.scenario, component_risks(g, self.source, self.contagion), self.source)
