from __future__ import annotations

import numpy as np
import pytest

from react_resilience.model import (Asset, AssetDependency, Component, Configuration, Instance, Scenario,
                                    ScenarioMeta, Segment)
from react_resilience.projection import ProjectionGraph

# lines collected by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def decay(k: int) -> list[list[float]]:
    return [[2.0 ** -abs(i - j) for j in range(k)] for i in range(k)]


def make_scenario(n_components=3, segments=None, configs=None, seg_matrix=None, conf_matrix=None,
                  links=None, asset_of=None, weights=None, deps=(), seg_inherent=None, conf_inherent=None,
                  name="hand") -> Scenario:
    """Small hand-built scenario: component i has id i, one instance each."""
    segments = list(segments if segments is not None else [0] * n_components)
    configs = list(configs if configs is not None else [0] * n_components)
    S = len(seg_matrix) if seg_matrix is not None else max(segments) + 1
    K = len(conf_matrix) if conf_matrix is not None else max(configs) + 1
    seg_matrix = seg_matrix if seg_matrix is not None else decay(S)
    conf_matrix = conf_matrix if conf_matrix is not None else decay(K)
    asset_of = list(asset_of if asset_of is not None else range(n_components))
    n_assets = max(asset_of) + 1
    weights = list(weights if weights is not None else [1.0] * n_assets)
    links = links or {}
    sym: dict[int, set[int]] = {i: set() for i in range(n_components)}
    for a, bs in links.items():
        for b in bs:
            sym[a].add(b)
            sym[b].add(a)
    seg_inherent = seg_inherent if seg_inherent is not None else [1.0 / (i + 1) for i in range(S)]
    conf_inherent = conf_inherent if conf_inherent is not None else [0.5] * K
    return Scenario(
        assets=[Asset(i, float(w)) for i, w in enumerate(weights)],
        asset_deps=[AssetDependency(a, b, w) for a, b, w in deps],
        components=[Component(i, asset_of[i], tuple(sorted(sym[i]))) for i in range(n_components)],
        instances=[Instance(i, configs[i], segments[i]) for i in range(n_components)],
        configurations=[Configuration(i, float(v)) for i, v in enumerate(conf_inherent)],
        config_similarity=conf_matrix,
        segments=[Segment(i, float(v)) for i, v in enumerate(seg_inherent)],
        segment_reachability=seg_matrix,
        meta=ScenarioMeta(name=name, seed=0, n=n_assets, p=0.0),
    )


HALF = [[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]]
TRI_V = [[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]]


@pytest.fixture
def triangle_scenario() -> Scenario:
    """Three components on three segments with all reachabilities 0.5 and
    configurations 0, 1, 2 with v(0,1) = v(1,2) = 0.5, v(0,2) = 0.25."""
    return make_scenario(3, segments=[0, 1, 2], configs=[0, 1, 2], seg_matrix=HALF, conf_matrix=TRI_V)


@pytest.fixture
def triangle_network() -> ProjectionGraph:
    return ProjectionGraph.from_edges("network", [1, 2, 3], [0, 1, 2],
                                      {(1, 2): 0.5, (2, 3): 0.5, (1, 3): 0.5}, TRI_V)


def random_graph(rng: np.random.Generator, kind: str, n: int, p: float, k: int) -> ProjectionGraph:
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges[(i, j)] = float(rng.uniform(0.05, 1.0))
    inter = rng.uniform(0.05, 1.0, (k, k))
    np.fill_diagonal(inter, 1.0)
    colors = rng.integers(0, k, n)
    return ProjectionGraph.from_edges(kind, range(n), colors, edges, inter,
                                      node_inherent=rng.uniform(0, 1, n), color_inherent=rng.uniform(0, 1, k))
