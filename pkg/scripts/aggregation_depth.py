"""How many recurrence steps asset aggregation needs, against the undirected diameter.

The aggregation recurrence reaches its fixed point after (longest directed
path + 1) steps, which can exceed the undirected diameter of the same layer.

    python scripts/aggregation_depth.py --layers 300
"""

import argparse
from collections import Counter

import networkx as nx

from react_resilience.generate import GenSpec, gen_scenario
from react_resilience.model import asset_diameter


def main(layers: int, seed: int) -> None:
    gaps = Counter()
    for s in range(layers):
        n = (60, 70, 80)[s % 3]
        sc = gen_scenario(GenSpec(n=(n,), seed=seed + s), 0, 0, 0)
        dag = nx.DiGraph([(d.source, d.target) for d in sc.asset_deps])
        gaps[nx.dag_longest_path_length(dag) - asset_diameter(sc)] += 1
    over = sum(v for k, v in gaps.items() if k > 0)
    print(f"{layers} layers; longest directed path minus undirected diameter:")
    for k in sorted(gaps):
        print(f"  {k:+d}: {gaps[k]}")
    print(f"layers where d iterations are not enough: {over} ({100 * over / layers:.0f}%)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--layers", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1000)
    a = ap.parse_args()
    main(a.layers, a.seed)
