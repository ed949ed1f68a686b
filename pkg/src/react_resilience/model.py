"""Multilayer network model: assets, components, instances, configurations, segments.

All types are frozen dataclasses; matrices are stored as tuples of tuples so a
``Scenario`` is hashable and compares by value. Use :meth:`Scenario.config_matrix`
and :meth:`Scenario.segment_matrix` for numpy views.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

Matrix = tuple[tuple[float, ...], ...]


class ScenarioError(Exception):
    """Base class for scenario loading problems."""


class ScenarioParseError(ScenarioError):
    """File is not a well-formed scenario document."""


class ScenarioValidationError(ScenarioError):
    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        lines = "\n".join(f"  - {v}" for v in violations[:20])
        more = f"\n  ... {len(violations) - 20} more" if len(violations) > 20 else ""
        super().__init__(f"scenario failed validation:\n{lines}{more}")


@dataclass(frozen=True)
class Configuration:
    id: int
    inherent_vuln: float


@dataclass(frozen=True)
class Segment:
    id: int
    inherent_vuln: float


@dataclass(frozen=True)
class Asset:
    id: int
    weight: float


@dataclass(frozen=True)
class AssetDependency:
    """Risk flows ``source -> target``: ``target`` depends on ``source``."""

    source: int
    target: int
    weight: float = 1.0


@dataclass(frozen=True)
class Component:
    id: int
    asset_id: int
    similar_to: tuple[int, ...] = ()


@dataclass(frozen=True)
class Instance:
    component_id: int
    configuration_id: int
    segment_id: int


@dataclass(frozen=True)
class ScenarioMeta:
    name: str = ""
    seed: int | None = None
    n: int | None = None
    p: float | None = None


@dataclass(frozen=True)
class Violation:
    layer: str
    entity: Any
    rule: str

    def __str__(self) -> str:
        return f"[{self.layer}] {self.entity}: {self.rule}"


@dataclass(frozen=True)
class Scenario:
    assets: tuple[Asset, ...]
    asset_deps: tuple[AssetDependency, ...]
    components: tuple[Component, ...]
    instances: tuple[Instance, ...]
    configurations: tuple[Configuration, ...]
    config_similarity: Matrix
    segments: tuple[Segment, ...]
    segment_reachability: Matrix
    meta: ScenarioMeta = field(default_factory=ScenarioMeta)

    def __post_init__(self):
        # accept lists / arrays for convenience, store tuples
        for name in ("assets", "asset_deps", "components", "instances", "configurations", "segments"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ("config_similarity", "segment_reachability"):
            m = getattr(self, name)
            object.__setattr__(self, name, tuple(tuple(float(x) for x in row) for row in m))

    # -- convenience views -------------------------------------------------

    @cached_property
    def config_matrix(self) -> np.ndarray:
        m = np.array(self.config_similarity, dtype=float).reshape(len(self.configurations), -1)
        m.setflags(write=False)
        return m

    @cached_property
    def segment_matrix(self) -> np.ndarray:
        m = np.array(self.segment_reachability, dtype=float).reshape(len(self.segments), -1)
        m.setflags(write=False)
        return m

    @cached_property
    def component_index(self) -> dict[int, int]:
        return {c.id: i for i, c in enumerate(self.components)}

    @cached_property
    def asset_index(self) -> dict[int, int]:
        return {a.id: i for i, a in enumerate(self.assets)}

    @cached_property
    def primary_instance(self) -> dict[int, Instance]:
        """First listed instance of each component; projections read these."""
        out: dict[int, Instance] = {}
        for inst in self.instances:
            out.setdefault(inst.component_id, inst)
        return out

    def with_instances(self, instances) -> "Scenario":
        return replace(self, instances=tuple(instances))


# -- validation ------------------------------------------------------------


def _in_unit(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and 0.0 <= x <= 1.0


def _check_matrix(name: str, m: Matrix, size: int) -> list[Violation]:
    out = []
    if len(m) != size or any(len(row) != size for row in m):
        shape = (len(m), {len(r) for r in m})
        return [Violation(name, "shape", f"expected {size}x{size}, got {shape}")]
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if not _in_unit(x):
                out.append(Violation(name, (i, j), f"entry {x!r} outside [0, 1]"))
            elif i == j and x != 1.0:
                out.append(Violation(name, (i, j), f"diagonal entry {x!r} must be 1"))
    return out


def validate(scenario: Scenario) -> list[Violation]:
    """Return every broken invariant; an empty list means the scenario is consistent."""
    v: list[Violation] = []

    asset_ids = [a.id for a in scenario.assets]
    asset_set = set(asset_ids)
    if len(asset_set) != len(asset_ids):
        v.append(Violation("Asset", "ids", "duplicate asset id"))
    for a in scenario.assets:
        if not (isinstance(a.weight, (int, float)) and math.isfinite(a.weight) and a.weight > 0):
            v.append(Violation("Asset", a.id, f"weight {a.weight!r} must be positive"))

    for d in scenario.asset_deps:
        ent = (d.source, d.target)
        if d.source not in asset_set or d.target not in asset_set:
            v.append(Violation("AssetDependency", ent, "references unknown asset"))
        if d.source == d.target:
            v.append(Violation("AssetDependency", ent, "self-loop"))
        if not _in_unit(d.weight):
            v.append(Violation("AssetDependency", ent, f"weight {d.weight!r} outside [0, 1]"))

    comp_ids = [c.id for c in scenario.components]
    comp_set = set(comp_ids)
    if len(comp_set) != len(comp_ids):
        v.append(Violation("Component", "ids", "duplicate component id"))
    links = {c.id: set(c.similar_to) for c in scenario.components}
    for c in scenario.components:
        if c.asset_id not in asset_set:
            v.append(Violation("Component", c.id, f"references unknown asset {c.asset_id}"))
        for o in c.similar_to:
            if o == c.id:
                v.append(Violation("Component", c.id, "similarity self-link"))
            elif o not in comp_set:
                v.append(Violation("Component", c.id, f"similarity link to unknown component {o}"))
            elif c.id not in links[o]:
                v.append(Violation("Component", c.id, f"similarity link to {o} is not symmetric"))

    K, S = len(scenario.configurations), len(scenario.segments)
    for i, conf in enumerate(scenario.configurations):
        if conf.id != i:
            v.append(Violation("Configuration", conf.id, f"ids must be dense 0..K-1 (position {i})"))
        if not _in_unit(conf.inherent_vuln):
            v.append(Violation("Configuration", conf.id, f"inherent_vuln {conf.inherent_vuln!r} outside [0, 1]"))
    for i, seg in enumerate(scenario.segments):
        if seg.id != i:
            v.append(Violation("Segment", seg.id, f"ids must be dense 0..S-1 (position {i})"))
        if not _in_unit(seg.inherent_vuln):
            v.append(Violation("Segment", seg.id, f"inherent_vuln {seg.inherent_vuln!r} outside [0, 1]"))
    v += _check_matrix("ConfigSimilarityMatrix", scenario.config_similarity, K)
    v += _check_matrix("SegmentReachabilityMatrix", scenario.segment_reachability, S)

    covered = set()
    for inst in scenario.instances:
        ent = inst.component_id
        if inst.component_id not in comp_set:
            v.append(Violation("Instance", ent, "references unknown component"))
        covered.add(inst.component_id)
        if not (0 <= inst.configuration_id < K):
            v.append(Violation("Instance", ent, f"configuration {inst.configuration_id} not in [0, {K})"))
        if not (0 <= inst.segment_id < S):
            v.append(Violation("Instance", ent, f"segment {inst.segment_id} not in [0, {S})"))
    for cid in comp_ids:
        if cid not in covered:
            v.append(Violation("Instance", cid, "component has no instance"))
    return v


# -- asset layer geometry ----------------------------------------------------


def asset_diameter(scenario: Scenario) -> int:
    """Largest shortest-path length in the undirected asset dependency graph.

    Disconnected parts are measured separately and the maximum is returned.
    """
    idx = scenario.asset_index
    adj: list[set[int]] = [set() for _ in scenario.assets]
    for d in scenario.asset_deps:
        a, b = idx[d.source], idx[d.target]
        adj[a].add(b)
        adj[b].add(a)
    best = 0
    for s in range(len(adj)):
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        best = max(best, max(dist.values()))
    return best


# -- serialization -------------------------------------------------------------


def to_dict(s: Scenario) -> dict:
    return {
        "assets": [{"id": a.id, "weight": a.weight} for a in s.assets],
        "asset_deps": [{"from": d.source, "to": d.target, "weight": d.weight} for d in s.asset_deps],
        "components": [{"id": c.id, "asset_id": c.asset_id, "similar_to": list(c.similar_to)} for c in s.components],
        "instances": [
            {"component_id": i.component_id, "configuration_id": i.configuration_id, "segment_id": i.segment_id}
            for i in s.instances
        ],
        "configurations": [{"id": c.id, "inherent_vuln": c.inherent_vuln} for c in s.configurations],
        "config_similarity": [list(r) for r in s.config_similarity],
        "segments": [{"id": g.id, "inherent_vuln": g.inherent_vuln} for g in s.segments],
        "segment_reachability": [list(r) for r in s.segment_reachability],
        "meta": {"name": s.meta.name, "seed": s.meta.seed, "n": s.meta.n, "p": s.meta.p},
    }


def from_dict(d: dict) -> Scenario:
    try:
        meta = d.get("meta") or {}
        return Scenario(
            assets=[Asset(int(a["id"]), float(a["weight"])) for a in d["assets"]],
            asset_deps=[AssetDependency(int(x["from"]), int(x["to"]), float(x.get("weight", 1.0))) for x in d["asset_deps"]],
            components=[
                Component(int(c["id"]), int(c["asset_id"]), tuple(int(o) for o in c.get("similar_to", ())))
                for c in d["components"]
            ],
            instances=[
                Instance(int(i["component_id"]), int(i["configuration_id"]), int(i["segment_id"])) for i in d["instances"]
            ],
            configurations=[Configuration(int(c["id"]), float(c["inherent_vuln"])) for c in d["configurations"]],
            config_similarity=d["config_similarity"],
            segments=[Segment(int(g["id"]), float(g["inherent_vuln"])) for g in d["segments"]],
            segment_reachability=d["segment_reachability"],
            meta=ScenarioMeta(
                name=str(meta.get("name", "")),
                seed=meta.get("seed"),
                n=meta.get("n"),
                p=meta.get("p"),
            ),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ScenarioParseError(f"malformed scenario document: {exc!r}") from exc


def dumps(s: Scenario) -> str:
    # json emits repr() floats, which round-trip exactly
    return json.dumps(to_dict(s), indent=1)


def save(s: Scenario, path) -> None:
    Path(path).write_text(dumps(s) + "\n", encoding="utf-8")


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario document must be a JSON object")
    s = from_dict(doc)
    problems = validate(s)
    if problems:
        raise ScenarioValidationError(problems)
    return s


def load(path) -> Scenario:
    return loads(Path(path).read_text(encoding="utf-8"))
