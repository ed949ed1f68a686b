"""Objectives minimized by the recoloring solvers."""

from __future__ import annotations

import numpy as np

from ..projection import ProjectionGraph

OBJECTIVES = ("full", "sum", "max")


def node_terms(graph: ProjectionGraph, colors) -> np.ndarray:
    """Inherent term of each node under its color (node inherent x color inherent)."""
    colors = np.asarray(colors)
    return graph.node_inherent * graph.color_inherent[colors]


def sum_surrogate(graph: ProjectionGraph, colors) -> float:
    """Sum of node self-terms plus, per edge (u < v), weight x interference[c_u, c_v]."""
    colors = np.asarray(colors)
    iu, ju, w = graph.edge_arrays()
    pair = graph.interference[colors[iu], colors[ju]]
    return float(node_terms(graph, colors).sum() + (w * pair).sum())


def node_interference(graph: ProjectionGraph, colors) -> np.ndarray:
    colors = np.asarray(colors)
    wi = np.where(graph.adjacency, graph.weights, 0.0)
    return (wi * graph.interference[np.ix_(colors, colors)]).sum(axis=1)


def max_interference(graph: ProjectionGraph, colors) -> float:
    if graph.n == 0:
        return 0.0
    return float(node_interference(graph, colors).max())


def make_objective(name: str, graph: ProjectionGraph, breach=None):
    """Return ``f(colors) -> float`` for ``name`` in ``OBJECTIVES``."""
    if name == "sum":
        return lambda c: sum_surrogate(graph, c)
    if name == "max":
        return lambda c: max_interference(graph, c)
    if name == "full":
        if breach is None:
            raise ValueError("the full-risk objective needs a breach (scenario + compromised component)")
        return breach.risk
    raise ValueError(f"unknown objective {name!r}; expected one of {OBJECTIVES}")
