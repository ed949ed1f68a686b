"""Seeded random scenario suites.

Asset layers are Erdos-Renyi graphs oriented from lower to higher index (so
they are DAGs) with unit dependency weights; each asset is served by two
components; component similarity is another Erdos-Renyi graph; configuration
similarity and segment reachability both decay as 2^-|i-j|.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .model import (Asset, AssetDependency, Component, Configuration, Instance, Scenario, ScenarioMeta, Segment,
                    save)


@dataclass(frozen=True)
class GenSpec:
    n: tuple[int, ...] = (60, 70, 80)
    p_components: tuple[float, ...] = (0.1, 0.3)
    p_assets: float = 0.05
    instance_layers: int = 10
    config_count: int = 10
    segment_count: int = 6
    seed: int = 2016

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in np.atleast_1d(self.n)))
        object.__setattr__(self, "p_components", tuple(float(x) for x in np.atleast_1d(self.p_components)))
        for p in (self.p_assets, *self.p_components):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if min(self.n + (self.instance_layers, self.config_count, self.segment_count)) < 1:
            raise ValueError("counts must be at least 1")

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        return cls(**d)


def decay_matrix(size: int) -> np.ndarray:
    i = np.arange(size)
    return 2.0 ** -np.abs(i[:, None] - i[None, :])


def _er_pairs(rng: np.random.Generator, n: int, p: float) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_asset_layer(n: int, p: float, rng: np.random.Generator) -> tuple[list[Asset], list[AssetDependency]]:
    weights = rng.uniform(1.0, 10.0, n)
    assets = [Asset(i, float(w)) for i, w in enumerate(weights)]
    deps = [AssetDependency(a, b, 1.0) for a, b in _er_pairs(rng, n, p)]
    return assets, deps


def gen_component_layer(n_assets: int, p: float, rng: np.random.Generator) -> list[Component]:
    """Two components per asset (2k and 2k+1 serve asset k), ER similarity links."""
    m = 2 * n_assets
    links: list[list[int]] = [[] for _ in range(m)]
    for a, b in _er_pairs(rng, m, p):
        links[a].append(b)
        links[b].append(a)
    return [Component(i, i // 2, tuple(sorted(links[i]))) for i in range(m)]


def gen_vulnerabilities(config_count: int, rng: np.random.Generator) -> tuple[list[Configuration], np.ndarray]:
    inherent = rng.uniform(0.0, 1.0, config_count)
    return [Configuration(i, float(v)) for i, v in enumerate(inherent)], decay_matrix(config_count)


def gen_topology(segment_count: int) -> tuple[list[Segment], np.ndarray]:
    """Concentric segments; segment 0 is the exposed outer ring (mu = 1/rank)."""
    return [Segment(i, 1.0 / (i + 1)) for i in range(segment_count)], decay_matrix(segment_count)


def gen_deployment(components: list[Component], config_count: int, segment_count: int,
                   rng: np.random.Generator) -> list[Instance]:
    confs = rng.integers(0, config_count, len(components))
    segs = rng.integers(0, segment_count, len(components))
    return [Instance(c.id, int(k), int(s)) for c, k, s in zip(components, confs, segs)]


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class SuiteMember:
    name: str
    n: int
    p: float
    layer: int
    scenario: Scenario = field(compare=False, repr=False)


def gen_scenario(spec: GenSpec, n_index: int, p_index: int, layer: int) -> Scenario:
    n, p = spec.n[n_index], spec.p_components[p_index]
    base = _rng(spec.seed, n_index, p_index)
    assets, deps = gen_asset_layer(n, spec.p_assets, base)
    components = gen_component_layer(n, p, base)
    lrng = _rng(spec.seed, n_index, p_index, layer + 1)
    configs, vmat = gen_vulnerabilities(spec.config_count, lrng)
    segments, mumat = gen_topology(spec.segment_count)
    instances = gen_deployment(components, spec.config_count, spec.segment_count, lrng)
    return Scenario(
        assets=assets,
        asset_deps=deps,
        components=components,
        instances=instances,
        configurations=configs,
        config_similarity=vmat,
        segments=segments,
        segment_reachability=mumat,
        meta=ScenarioMeta(name=f"n{n}_p{p:g}_l{layer}", seed=spec.seed, n=n, p=p),
    )


def gen_suite(spec: GenSpec) -> list[SuiteMember]:
    """One asset+component layer per (n, p), ``instance_layers`` deployments each."""
    out = []
    for i, n in enumerate(spec.n):
        for j, p in enumerate(spec.p_components):
            for layer in range(spec.instance_layers):
                sc = gen_scenario(spec, i, j, layer)
                out.append(SuiteMember(sc.meta.name, n, p, layer, sc))
    return out


def write_suite(members: list[SuiteMember], out_dir, spec: GenSpec | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for m in members:
        fname = f"{m.name}.json"
        save(m.scenario, out_dir / fname)
        entries.append({"file": fname, "name": m.name, "n": m.n, "p": m.p, "layer": m.layer})
    manifest = {"spec": asdict(spec) if spec else None, "members": entries}
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return path


def read_suite(manifest_path) -> list[SuiteMember]:
    from .model import load

    manifest_path = Path(manifest_path)
    doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    out = []
    for e in doc["members"]:
        sc = load(manifest_path.parent / e["file"])
        out.append(SuiteMember(e.get("name", sc.meta.name), int(e["n"]), float(e["p"]), int(e["layer"]), sc))
    return out


def extend_palette(scenario: Scenario, kind, size: int) -> Scenario:
    """Grow the recolorable set (configurations for the network projection,
    segments for the config projection) to ``size`` entries.

    Existing entries are untouched; new pairs follow the 2^-|i-j| decay, new
    segments get 1/rank exposure and new configurations a seeded uniform
    inherent value.
    """
    from .projection import ProjectionKind

    kind = ProjectionKind.parse(kind)
    if kind is ProjectionKind.NETWORK:
        old = len(scenario.configurations)
        if size <= old:
            return scenario
        m = decay_matrix(size)
        m[:old, :old] = scenario.config_matrix
        rng = _rng(scenario.meta.seed or 0, 7919, size)
        extra = rng.uniform(0.0, 1.0, size - old)
        confs = list(scenario.configurations) + [Configuration(old + i, float(v)) for i, v in enumerate(extra)]
        return Scenario(scenario.assets, scenario.asset_deps, scenario.components, scenario.instances,
                        confs, m, scenario.segments, scenario.segment_reachability, scenario.meta)
    old = len(scenario.segments)
    if size <= old:
        return scenario
    m = decay_matrix(size)
    m[:old, :old] = scenario.segment_matrix
    segs = list(scenario.segments) + [Segment(i, 1.0 / (i + 1)) for i in range(old, size)]
    return Scenario(scenario.assets, scenario.asset_deps, scenario.components, scenario.instances,
                    scenario.configurations, scenario.config_similarity, segs, m, scenario.meta)
