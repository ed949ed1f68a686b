import numpy as np
import pytest
from scipy.stats import chisquare

from react_resilience.generate import (GenSpec, extend_palette, gen_asset_layer, gen_component_layer,
                                       gen_deployment, gen_scenario, gen_suite, gen_topology, gen_vulnerabilities,
                                       read_suite, write_suite)
from react_resilience.model import dumps, validate
from react_resilience.projection import build_projection


def test_forced_single_edge():
    assets, deps = gen_asset_layer(2, 1.0, np.random.default_rng(0))
    assert [(d.source, d.target, d.weight) for d in deps] == [(0, 1, 1.0)]
    assert all(1.0 <= a.weight <= 10.0 for a in assets)


def test_asset_edge_count_mean():
    counts = [len(gen_asset_layer(60, 0.05, np.random.default_rng(s))[1]) for s in range(200)]
    assert abs(np.mean(counts) - 0.05 * 60 * 59 / 2) <= 5


def test_asset_layer_is_acyclic():
    for s in range(50):
        _, deps = gen_asset_layer(30, 0.2, np.random.default_rng(s))
        assert all(d.source < d.target for d in deps)


def test_component_layer_shape():
    comps = gen_component_layer(60, 0.1, np.random.default_rng(0))
    assert len(comps) == 120
    per_asset = np.bincount([c.asset_id for c in comps])
    assert per_asset.tolist() == [2] * 60
    assert all(not c.similar_to for c in gen_component_layer(5, 0.0, np.random.default_rng(0)))


def test_component_mean_degree():
    degs = [np.mean([len(c.similar_to) for c in gen_component_layer(60, 0.1, np.random.default_rng(s))])
            for s in range(100)]
    assert abs(np.mean(degs) - 119 * 0.1) <= 1


def test_vulnerability_closed_forms():
    confs, v = gen_vulnerabilities(10, np.random.default_rng(0))
    assert v[0, 1] == 0.5 and v[1, 2] == 0.5
    assert v[0, 5] == 1 / 32
    assert np.all(np.diag(v) == 1.0)
    assert all(0 <= c.inherent_vuln <= 1 for c in confs)


def test_topology_closed_forms():
    segs, mu = gen_topology(6)
    assert segs[0].inherent_vuln == 1.0 and segs[5].inherent_vuln == 1 / 6
    assert mu[0, 5] == 1 / 32


def test_deployment_is_uniform():
    comps = gen_component_layer(5000, 0.0, np.random.default_rng(1))
    inst = gen_deployment(comps, 10, 6, np.random.default_rng(2))
    counts = np.bincount([i.segment_id for i in inst], minlength=6)
    assert chisquare(counts).pvalue > 0.01


def test_default_suite_size_and_validity():
    suite = gen_suite(GenSpec())
    assert len(suite) == 60
    assert all(validate(m.scenario) == [] for m in suite[::7])
    assert {(m.n, m.p) for m in suite} == {(n, p) for n in (60, 70, 80) for p in (0.1, 0.3)}


def test_suite_is_deterministic():
    spec = GenSpec(n=(10, 12), p_components=(0.2,), instance_layers=3)
    a, b = gen_suite(spec), gen_suite(spec)
    assert [dumps(m.scenario) for m in a] == [dumps(m.scenario) for m in b]
    assert len(a) == 2 * 1 * 3


def test_layers_share_structure_but_not_deployment():
    spec = GenSpec(n=(20,), p_components=(0.3,))
    s0, s1 = gen_scenario(spec, 0, 0, 0), gen_scenario(spec, 0, 0, 1)
    assert s0.components == s1.components and s0.asset_deps == s1.asset_deps
    assert s0.instances != s1.instances


def test_write_and_read_suite(tmp_path):
    spec = GenSpec(n=(5,), p_components=(0.5,), instance_layers=2)
    suite = gen_suite(spec)
    manifest = write_suite(suite, tmp_path, spec)
    back = read_suite(manifest)
    assert [(m.name, m.n, m.p, m.layer) for m in back] == [(m.name, m.n, m.p, m.layer) for m in suite]
    assert [m.scenario for m in back] == [m.scenario for m in suite]


def test_spec_rejects_bad_values():
    with pytest.raises(ValueError):
        GenSpec(p_assets=1.5)
    with pytest.raises(ValueError):
        GenSpec(n=(0,))


@pytest.mark.parametrize("kind", ["network", "config"])
def test_extend_palette_keeps_original_entries(kind):
    sc = gen_scenario(GenSpec(n=(6,)), 0, 0, 0)
    big = extend_palette(sc, kind, 15)
    assert validate(big) == []
    g0, g1 = build_projection(sc, kind), build_projection(big, kind)
    assert g1.color_count == 15
    k = g0.color_count
    assert np.array_equal(g1.interference[:k, :k], g0.interference)
    assert np.array_equal(g1.colors, g0.colors)
    assert extend_palette(sc, kind, 3) is sc
