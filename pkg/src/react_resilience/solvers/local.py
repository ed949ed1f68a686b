"""Blind local search: hill climbing and simulated annealing over single-node recolors."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray], float]


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    # mutation and acceptance draws come from separate streams so an annealer
    # at zero temperature replays the hill climber move for move
    mut, acc = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(mut), np.random.default_rng(acc)


def _moves(rng: np.random.Generator, n: int, k: int, iterations: int):
    init = rng.integers(0, k, n)
    return init, rng.integers(0, n, iterations), rng.integers(0, k, iterations)


def hill_climb(n: int, k: int, objective: Objective, iterations: int, seed: int,
               trace: list | None = None) -> np.ndarray:
    """Random start; recolor one random node per step, keep only strict improvements."""
    rng, _ = _streams(seed)
    colors, nodes, cols = _moves(rng, n, k, iterations)
    cur = objective(colors)
    for v, c in zip(nodes, cols):
        old = colors[v]
        if c == old:
            continue
        colors[v] = c
        val = objective(colors)
        if val < cur:
            cur = val
        else:
            colors[v] = old
        if trace is not None:
            trace.append(cur)
    return colors


def acceptance_probability(delta: float, tau: float) -> float:
    """Metropolis rule exp(-delta / tau); improvements always pass, and at zero
    temperature only strict improvements do."""
    if delta < 0:
        return 1.0
    if tau <= 0:
        return 0.0
    return math.exp(-delta / tau)


def simulated_anneal(n: int, k: int, objective: Objective, iterations: int, seed: int,
                     initial_temp: float | None = None, trace: list | None = None) -> np.ndarray:
    """Same kernel as :func:`hill_climb`; temperature falls linearly to zero.

    ``initial_temp=None`` uses the objective value of the random start.
    Returns the best coloring seen.
    """
    rng, acc = _streams(seed)
    colors, nodes, cols = _moves(rng, n, k, iterations)
    cur = objective(colors)
    t0 = cur if initial_temp is None else initial_temp
    if t0 < 0:
        raise ValueError("initial temperature must be non-negative")
    best, best_val = colors.copy(), cur
    for it, (v, c) in enumerate(zip(nodes, cols)):
        old = colors[v]
        if c == old:
            continue
        tau = t0 * (1.0 - it / iterations)
        colors[v] = c
        val = objective(colors)
        p = acceptance_probability(val - cur, tau)
        if p >= 1.0 or (p > 0.0 and acc.random() < p):
            cur = val
            if val < best_val:
                best, best_val = colors.copy(), val
        else:
            colors[v] = old
        if trace is not None:
            trace.append(cur)
    return best
