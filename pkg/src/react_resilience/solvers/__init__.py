"""Recoloring solvers behind one entry point, :func:`solve`."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..projection import ProjectionGraph
from .bp import FactorGraph, Partition, build_factor_graph, gossip_partition, gpbp, min_sum_tree
from .gcg import PaletteTooSmall, gcg
from .greedy import colors_used, dsatur_proper, is_proper, tsc_dsatur, welsh_powell
from .local import acceptance_probability, hill_climb, simulated_anneal
from .objectives import OBJECTIVES, make_objective, max_interference, sum_surrogate

SOLVER_IDS = ("tsc-dsatur", "gpbp", "hc", "sa", "dsatur", "wp", "gcg")
PROPER_SOLVERS = ("dsatur", "wp", "gcg")
UNBOUNDED_PALETTE = ("dsatur", "wp")


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    iterations: int = 10_000
    sa_initial_temp: float | None = None
    gpbp_rounds: int = 10
    contagion: str = "min"
    hc_objective: str = "full"
    sa_objective: str = "full"
    gpbp_objective: str = "sum"

    def __post_init__(self):
        if self.iterations <= 0:
            raise ValueError("iterations must be positive")
        if self.sa_initial_temp is not None and self.sa_initial_temp < 0:
            raise ValueError("initial temperature must be non-negative")
        for name in (self.hc_objective, self.sa_objective, self.gpbp_objective):
            if name not in OBJECTIVES:
                raise ValueError(f"unknown objective {name!r}")


@dataclass
class SolveResult:
    colors: np.ndarray
    coloring: dict[int, int]
    objective: float
    elapsed: float                 # seconds spent in the search itself
    colors_used: int
    kept_original: bool
    rounds: int = 0                # iterations / rounds / sweeps budget used
    extra: dict = field(default_factory=dict)


def _run(graph: ProjectionGraph, solver_id: str, config: SolverConfig, breach) -> tuple[np.ndarray, int]:
    rng = np.random.default_rng(config.seed)
    n, k = graph.n, graph.color_count
    if solver_id == "tsc-dsatur":
        return tsc_dsatur(graph, rng), n
    if solver_id == "dsatur":
        return dsatur_proper(graph), n
    if solver_id == "wp":
        return welsh_powell(graph), n
    if solver_id == "gcg":
        return gcg(graph, rng, max_sweeps=config.iterations), config.iterations
    if solver_id == "hc":
        obj = make_objective(config.hc_objective, graph, breach)
        return hill_climb(n, k, obj, config.iterations, config.seed), config.iterations
    if solver_id == "sa":
        obj = make_objective(config.sa_objective, graph, breach)
        return simulated_anneal(n, k, obj, config.iterations, config.seed, config.sa_initial_temp), config.iterations
    if solver_id == "gpbp":
        if config.gpbp_objective != "sum":
            raise ValueError("gpbp only optimizes the sum objective")
        return gpbp(graph, config.gpbp_rounds, config.seed), config.gpbp_rounds
    raise ValueError(f"unknown solver {solver_id!r}; expected one of {SOLVER_IDS}")


def solve(graph: ProjectionGraph, solver_id: str, config: SolverConfig | None = None, breach=None) -> SolveResult:
    """Recolor ``graph`` with ``solver_id``.

    ``breach`` (a :class:`react_resilience.risk.Breach` on the same projection)
    supplies the full-risk objective; the result is never worse than the
    current coloring under it. Without a breach the sum objective arbitrates.
    """
    config = config or SolverConfig()
    if solver_id not in SOLVER_IDS:
        raise ValueError(f"unknown solver {solver_id!r}; expected one of {SOLVER_IDS}")
    if graph.n == 0:
        raise ValueError("cannot solve an empty graph")
    if breach is not None and breach.graph.nodes != graph.nodes:
        raise ValueError("breach and graph describe different node sets")
    judge = breach.risk if breach is not None else (lambda c: sum_surrogate(graph, c))
    original = graph.colors.copy()

    if graph.color_count == 1:
        colors, elapsed, rounds = original, 0.0, 0
    else:
        t0 = time.perf_counter()
        colors, rounds = _run(graph, solver_id, config, breach)
        elapsed = time.perf_counter() - t0
    colors = np.asarray(colors, dtype=int)
    used = colors_used(colors)
    if used > graph.color_count:
        raise PaletteTooSmall(f"{solver_id} used {used} colors but the projection offers {graph.color_count}")

    base = judge(original)
    val = judge(colors) if not np.array_equal(colors, original) else base
    kept = not val < base
    if kept:
        colors, val = original, base
    return SolveResult(
        colors=colors,
        coloring={c: int(x) for c, x in zip(graph.nodes, colors)},
        objective=float(val),
        elapsed=elapsed,
        colors_used=used,
        kept_original=kept,
        rounds=rounds,
    )


__all__ = [
    "SOLVER_IDS", "PROPER_SOLVERS", "UNBOUNDED_PALETTE", "SolverConfig", "SolveResult", "solve",
    "tsc_dsatur", "dsatur_proper", "welsh_powell", "gcg", "hill_climb", "simulated_anneal", "gpbp",
    "acceptance_probability", "build_factor_graph", "gossip_partition", "min_sum_tree", "FactorGraph",
    "Partition", "PaletteTooSmall", "sum_surrogate", "max_interference", "make_objective", "colors_used",
    "is_proper",
]
