"""Single-layer projections of a scenario, and writing colorings back."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .model import Scenario, ScenarioValidationError, validate


class ProjectionKind(enum.Enum):
    """Which vulnerabilities sit on edges and which are recolored.

    NETWORK: edges are segment reachability, colors are configurations.
    CONFIG: edges are configuration similarity links, colors are segments.
    """

    NETWORK = "network"
    CONFIG = "config"

    @classmethod
    def parse(cls, value) -> "ProjectionKind":
        if isinstance(value, cls):
            return value
        aliases = {"network": cls.NETWORK, "network-spread": cls.NETWORK,
                   "config": cls.CONFIG, "configuration": cls.CONFIG, "configuration-spread": cls.CONFIG}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown projection kind {value!r}") from None


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProjectionGraph:
    """Weighted undirected graph over components with a colored node set.

    ``weights`` is a dense symmetric n x n matrix; ``adjacency`` marks which
    entries are edges (a weight of 0 may still be an edge). ``interference[a, b]``
    is the color-pair factor for a step from a node colored ``a`` into one colored ``b``.
    """

    kind: ProjectionKind
    nodes: tuple[int, ...]
    colors: np.ndarray
    adjacency: np.ndarray
    weights: np.ndarray
    node_inherent: np.ndarray
    interference: np.ndarray
    color_inherent: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, kind, nodes, colors, edges: Mapping[tuple[int, int], float] | list,
                   interference, node_inherent=None, color_inherent=None) -> "ProjectionGraph":
        """Build from node ids and ``{(u, v): weight}`` (ids, not positions)."""
        kind = ProjectionKind.parse(kind)
        nodes = tuple(nodes)
        pos = {c: i for i, c in enumerate(nodes)}
        n = len(nodes)
        interference = np.asarray(interference, dtype=float)
        k = interference.shape[0]
        adj = np.zeros((n, n), dtype=bool)
        w = np.zeros((n, n))
        items = edges.items() if isinstance(edges, Mapping) else edges
        for (u, v), wt in items:
            i, j = pos[u], pos[v]
            if i == j:
                raise ValueError(f"self-loop on node {u}")
            adj[i, j] = adj[j, i] = True
            w[i, j] = w[j, i] = float(wt)
        if isinstance(colors, Mapping):
            colors = [colors[c] for c in nodes]
        return cls(
            kind=kind,
            nodes=nodes,
            colors=_frozen(colors, int),
            adjacency=_frozen(adj, bool),
            weights=_frozen(w),
            node_inherent=_frozen(np.ones(n) if node_inherent is None else node_inherent),
            interference=_frozen(interference),
            color_inherent=_frozen(np.ones(k) if color_inherent is None else color_inherent),
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def color_count(self) -> int:
        return self.interference.shape[0]

    @property
    def node_color(self) -> dict[int, int]:
        return {c: int(k) for c, k in zip(self.nodes, self.colors)}

    @property
    def index(self) -> dict[int, int]:
        if "index" not in self._cache:
            self._cache["index"] = {c: i for i, c in enumerate(self.nodes)}
        return self._cache["index"]

    def edges(self) -> dict[tuple[int, int], float]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return {(self.nodes[i], self.nodes[j]): float(self.weights[i, j]) for i, j in zip(iu, ju)}

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoints (u < v by position) and weights, cached."""
        if "edge_arrays" not in self._cache:
            iu, ju = np.nonzero(np.triu(self.adjacency, 1))
            self._cache["edge_arrays"] = (iu, ju, self.weights[iu, ju])
        return self._cache["edge_arrays"]

    def neighbors(self) -> list[np.ndarray]:
        if "neighbors" not in self._cache:
            self._cache["neighbors"] = [np.flatnonzero(row) for row in self.adjacency]
        return self._cache["neighbors"]

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def log_weights(self) -> np.ndarray:
        """log(edge weight) with -inf off the edge set."""
        if "log_weights" not in self._cache:
            with np.errstate(divide="ignore"):
                lw = np.where(self.adjacency, np.log(np.where(self.adjacency, self.weights, 1.0)), -np.inf)
            lw.setflags(write=False)
            self._cache["log_weights"] = lw
        return self._cache["log_weights"]

    def log_interference(self) -> np.ndarray:
        if "log_interference" not in self._cache:
            with np.errstate(divide="ignore"):
                li = np.log(self.interference)
            li.setflags(write=False)
            self._cache["log_interference"] = li
        return self._cache["log_interference"]

    def best_edge_products(self) -> np.ndarray:
        """All-pairs maximum log-product of edge weights alone (diagonal -inf).

        Depends only on the edge set, so recolored copies share it.
        """
        if "estar" not in self._cache:
            cost = np.where(self.adjacency, -self.log_weights(), np.inf)
            np.fill_diagonal(cost, np.inf)
            if self.n:
                dist = shortest_path(csgraph_from_dense(cost, null_value=np.inf), method="D", directed=True)
            else:
                dist = np.zeros((0, 0))
            est = -dist
            np.fill_diagonal(est, -np.inf)
            est.setflags(write=False)
            self._cache["estar"] = est
        return self._cache["estar"]

    def with_colors(self, colors) -> "ProjectionGraph":
        """Same graph with a new coloring; structural caches are shared."""
        if isinstance(colors, Mapping):
            colors = [colors[c] for c in self.nodes]
        colors = _frozen(colors, int)
        if colors.shape != (self.n,):
            raise ValueError("coloring must cover every node")
        if self.n and (colors.min() < 0 or colors.max() >= self.color_count):
            raise ValueError(f"color ids must lie in [0, {self.color_count})")
        shared = {k: v for k, v in self._cache.items()
                  if k in ("index", "edge_arrays", "neighbors", "log_weights", "log_interference", "estar")}
        return replace(self, colors=colors, _cache=shared)

    def coloring(self) -> dict[int, int]:
        return self.node_color


Coloring = dict[int, int]


def build_projection(scenario: Scenario, kind, edge_floor: float = 0.0, *, check: bool = True) -> ProjectionGraph:
    """Flatten ``scenario`` into the network-spread or configuration-spread graph."""
    kind = ProjectionKind.parse(kind)
    if not 0.0 <= edge_floor <= 1.0:
        raise ValueError("edge_floor must lie in [0, 1]")
    if check:
        problems = validate(scenario)
        if problems:
            raise ScenarioValidationError(problems)

    comps = scenario.components
    nodes = tuple(c.id for c in comps)
    inst = scenario.primary_instance
    seg = np.array([inst[c].segment_id for c in nodes], dtype=int)
    conf = np.array([inst[c].configuration_id for c in nodes], dtype=int)
    mu = scenario.segment_matrix
    v = scenario.config_matrix
    seg_inh = np.array([s.inherent_vuln for s in scenario.segments])
    conf_inh = np.array([c.inherent_vuln for c in scenario.configurations])
    n = len(nodes)

    if kind is ProjectionKind.NETWORK:
        pair = mu[np.ix_(seg, seg)]
        w = np.maximum(pair, pair.T)
        adj = w > edge_floor
        np.fill_diagonal(adj, False)
        colors, interference = conf, v
        node_inh, color_inh = seg_inh[seg], conf_inh
    else:
        pos = scenario.component_index
        adj = np.zeros((n, n), dtype=bool)
        for i, c in enumerate(comps):
            for o in c.similar_to:
                adj[i, pos[o]] = True
        adj |= adj.T
        pair = v[np.ix_(conf, conf)]
        w = np.maximum(pair, pair.T)
        colors, interference = seg, mu
        node_inh, color_inh = conf_inh[conf], seg_inh
    w = np.where(adj, w, 0.0)

    return ProjectionGraph(
        kind=kind,
        nodes=nodes,
        colors=_frozen(colors, int),
        adjacency=_frozen(adj, bool),
        weights=_frozen(w),
        node_inherent=_frozen(node_inh),
        interference=_frozen(interference),
        color_inherent=_frozen(color_inh),
    )


def apply_coloring(scenario: Scenario, kind, coloring: Mapping[int, int]) -> Scenario:
    """Write a coloring back as configurations (network) or segments (config).

    Every instance of a recolored component receives the new value.
    """
    kind = ProjectionKind.parse(kind)
    limit = len(scenario.configurations) if kind is ProjectionKind.NETWORK else len(scenario.segments)
    missing = [c.id for c in scenario.components if c.id not in coloring]
    if missing:
        raise ValueError(f"coloring is missing components {missing[:5]}")
    for cid, col in coloring.items():
        if not 0 <= int(col) < limit:
            raise ValueError(f"color {col} for component {cid} outside [0, {limit})")
    out = []
    for inst in scenario.instances:
        col = int(coloring[inst.component_id])
        if kind is ProjectionKind.NETWORK:
            out.append(replace(inst, configuration_id=col))
        else:
            out.append(replace(inst, segment_id=col))
    return scenario.with_instances(out)
