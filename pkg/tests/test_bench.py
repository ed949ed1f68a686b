import itertools
import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from react_resilience import bench
from react_resilience.generate import GenSpec, SuiteMember, gen_scenario, gen_suite
from react_resilience.projection import ProjectionGraph
from react_resilience.risk import Breach
from react_resilience.solvers import SOLVER_IDS, SolverConfig

from .conftest import make_scenario

FAST = SolverConfig(iterations=200, gpbp_rounds=3)


def member(sc, name="s", n=1, p=0.0, layer=0):
    return SuiteMember(name, n, p, layer, sc)


def row(ratio, n=60, p=0.1, solver="tsc-dsatur", projection="network", ms=1.0, scenario="s"):
    return bench.SweepRow(scenario, n, p, 0, 0, projection, solver, 10, 0, 1.0, ratio, ratio, ms, 1, 1, False)


# -- run_breach -----------------------------------------------------------------------

@pytest.mark.parametrize("solver", SOLVER_IDS)
def test_one_color_scenario_gives_ratio_one(solver):
    sc = make_scenario(4, segments=[0, 1, 0, 1], configs=[0] * 4, conf_matrix=[[1.0]], links={0: [1, 2]})
    for kind in ("network",):
        r = bench.run_breach(sc, 0, kind, solver, FAST, palette=bench.palette_sizes(sc, kind)[solver])
        assert r.risk_ratio == 1.0 and r.ok


def test_triangle_with_separated_configs_improves():
    far = [[1.0, 0.01], [0.01, 1.0]]
    sc = make_scenario(3, segments=[0, 1, 2], configs=[0, 0, 0], conf_matrix=far)
    b = Breach(sc, "network", 0)
    best = min(b.risk(np.array(c)) for c in itertools.product(range(2), repeat=3))
    assert best < b.risk()
    r = bench.run_breach(sc, 0, "network", "tsc-dsatur", FAST)
    assert r.risk_ratio < 1.0
    assert r.risk_ratio == r.risk_after / r.risk_before


def test_run_breach_rejects_unknown_component():
    with pytest.raises(KeyError):
        bench.run_breach(make_scenario(2), 9, "network", "hc", FAST)


def test_canonical_risk_columns():
    sc = gen_scenario(GenSpec(n=(5,), p_components=(0.5,)), 0, 0, 0)
    r = bench.run_breach(sc, 0, "config", "tsc-dsatur", FAST, canonical_risk=True)
    assert r.canonical_before > 0 and r.canonical_after > 0


# -- sweep -------------------------------------------------------------------------------

def test_one_breach_two_kinds_seven_solvers():
    sc = make_scenario(2, segments=[0, 1], configs=[0, 1], asset_of=[0, 0], links={0: [1]})
    cfg = bench.SweepConfig(solver=FAST, breach_sample="per-asset")
    rows = bench.sweep([member(sc)], cfg)
    assert len(rows) == 14
    assert all(r.ok and 0 < r.risk_ratio <= 1 for r in rows)


def test_per_asset_breach_count():
    sc = gen_scenario(GenSpec(n=(60,)), 0, 0, 0)
    assert len(bench.breach_set(sc, "per-asset")) == 60
    assert len(bench.breach_set(sc, "all")) == 120


def test_errors_are_recorded_in_row():
    sc = gen_scenario(GenSpec(n=(6,)), 0, 0, 0)  # 12 nodes on a complete graph, 10 configurations
    cfg = bench.SweepConfig(solver=FAST, kinds=("network",), solvers=("dsatur", "tsc-dsatur"), palette="native",
                            breach_sample="per-asset")
    rows = bench.sweep([member(sc, n=6)], cfg)
    bad = [r for r in rows if not r.ok]
    assert bad and all(r.solver == "dsatur" and "PaletteTooSmall" in r.error for r in bad)
    assert all(r.ok for r in rows if r.solver == "tsc-dsatur")


def test_subsample_limits_breaches():
    sc = gen_scenario(GenSpec(n=(6,)), 0, 0, 0)
    cfg = bench.SweepConfig(solver=FAST, kinds=("config",), solvers=("tsc-dsatur", "hc"), subsample_solvers=("hc",),
                            subsample=2)
    rows = bench.sweep([member(sc, n=6)], cfg)
    hc = [r.component for r in rows if r.solver == "hc"]
    assert hc == [0, 6]
    assert len([r for r in rows if r.solver == "tsc-dsatur"]) == 12


def test_sweep_is_independent_of_jobs():
    suite = gen_suite(GenSpec(n=(5, 6), p_components=(0.3,), instance_layers=2))
    cfg = bench.SweepConfig(solver=FAST, breach_sample="per-asset")
    a = bench.rows_to_csv(bench.sweep(suite, cfg, jobs=1), drop=("elapsed_ms",))
    b = bench.rows_to_csv(bench.sweep(suite, cfg, jobs=3), drop=("elapsed_ms",))
    assert a == b


def test_row_seed_depends_on_coordinates():
    s = {bench.row_seed(0, 60, 0.1, l, c, "network", "hc") for l in range(3) for c in range(3)}
    assert len(s) == 9
    assert bench.row_seed(1, 60, 0.1, 0, 0, "config", "sa") == bench.row_seed(1, 60, 0.1, 0, 0, "config", "sa")


def test_palette_sizes():
    sc = gen_scenario(GenSpec(n=(10,)), 0, 0, 0)
    paper = bench.palette_sizes(sc, "network", "paper")
    assert paper["tsc-dsatur"] == 10 and paper["dsatur"] == 20 and paper["gcg"] == 20
    matched = bench.palette_sizes(sc, "network", "matched")
    assert matched["tsc-dsatur"] == 20  # the network graph is complete: proper colorings need 2n colors
    assert set(bench.palette_sizes(sc, "config", "native").values()) == {6}


# -- summaries ---------------------------------------------------------------------------

def test_single_row_summary():
    s = bench.summarize([row(0.3)])
    g = s.groups[0]
    assert g.mean_ratio == 0.3 and g.ci95 == 0.0 and g.count == 1


def test_two_row_ci():
    g = bench.summarize([row(0.4), row(0.6)]).groups[0]
    assert g.mean_ratio == pytest.approx(0.5)
    assert g.ci95 == pytest.approx(1.96 * 0.1 / math.sqrt(2))
    assert round(g.ci95, 4) == 0.1386


def test_summary_groups_and_category_mean():
    rows = [row(0.2, solver="hc"), row(0.4, solver="sa"), row(0.9, n=70, solver="hc"), row(1.0, projection="config")]
    s = bench.summarize(rows + [bench.SweepRow("s", 60, 0.1, 0, 0, "network", "hc", 10, 0, error="boom")])
    assert s.errors == 1
    assert s.category_means[(60, 0.1, "network")] == pytest.approx(0.3)
    assert {(g.n, g.projection, g.solver) for g in s.groups} == {(60, "network", "hc"), (60, "network", "sa"),
                                                                 (70, "network", "hc"), (60, "config", "tsc-dsatur")}


def test_table_has_one_block_per_cell():
    rows = [row(0.1 * (i + 1), n=n, p=p, solver=s)
            for n, p in itertools.product((60, 70), (0.1, 0.3)) for i, s in enumerate(("dsatur", "wp", "gcg", "tsc-dsatur"))]
    text = bench.render_table(bench.summarize(rows))
    body = [ln for ln in text.splitlines()[2:-1]]
    assert len(body) == 16
    heads = [ln for ln in body if ln[:10].strip()]
    assert len(heads) == 4
    assert sum("*" in ln for ln in body) == 4 and all("DSATUR" in ln for ln in heads)


def test_spearman():
    assert bench.spearman([1, 2, 3], [2, 4, 9]) == pytest.approx(1.0)


# -- file formats -------------------------------------------------------------------------

def test_empty_sweep_csv_is_header_only():
    text = bench.rows_to_csv([])
    assert text == ",".join(bench.ROW_FIELDS) + "\n"


def test_csv_round_trip(tmp_path):
    sc = gen_scenario(GenSpec(n=(4,)), 0, 0, 0)
    cfg = bench.SweepConfig(solver=FAST, breach_sample="per-asset", canonical_risk=True)
    rows = bench.sweep([member(sc, n=4, p=0.1)], cfg)
    rows.append(bench.SweepRow("x", 1, 0.5, 0, 3, "config", "hc", 6, 7, error="ValueError: bad, \"quoted\""))
    path = tmp_path / "r.csv"
    bench.emit(rows, "csv", path)
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert bench.read_csv(path) == rows


def test_read_csv_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(bench.ResultsFormatError):
        bench.read_csv(p)
    p.write_text("")
    with pytest.raises(bench.ResultsFormatError):
        bench.read_csv(p)


def test_plotdata_is_tidy():
    text = bench.emit([row(0.5), row(0.7, solver="gpbp")], "plotdata")
    lines = text.splitlines()
    assert lines[0] == "figure,n,p,np,projection,solver,metric,value"
    assert all(len(ln.split(",")) == 8 for ln in lines)


# -- centrality ------------------------------------------------------------------------------

def graph_of(n, edges):
    return ProjectionGraph.from_edges("config", range(n), [0] * n, {e: 1.0 for e in edges}, [[1.0]])


def test_star_betweenness():
    cent, conv = bench.centralities(graph_of(5, [(0, i) for i in range(1, 5)]))
    assert cent["betweenness"][0] == pytest.approx(1.0)
    assert np.allclose(cent["betweenness"][1:], 0.0)
    assert conv == "standard"


def test_cycle_degrees_equal():
    cent, _ = bench.centralities(graph_of(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert np.allclose(cent["degree"], cent["degree"][0])


def _power_iteration(adj, iters=10_000):
    x = np.ones(adj.shape[0])
    m = adj + np.eye(adj.shape[0])  # same eigenvectors, avoids period-2 oscillation
    for _ in range(iters):
        y = m @ x
        y /= np.linalg.norm(y)
        if np.allclose(x, y, atol=1e-15, rtol=0):
            break
        x = y
    return x


def test_eigenvector_matches_power_iteration():
    rng = np.random.default_rng(3)
    edges = [(i, j) for i in range(10) for j in range(i + 1, 10) if rng.random() < 0.5]
    g = graph_of(10, edges)
    cent, _ = bench.centralities(g)
    adj = g.adjacency.astype(float)
    assert np.allclose(cent["eigenvector"], _power_iteration(adj), atol=1e-8, rtol=0)


def _bfs(adj, s):
    dist, sigma = {s: 0}, {s: 1}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in np.flatnonzero(adj[u]):
            w = int(w)
            if w not in dist:
                dist[w], sigma[w] = dist[u] + 1, 0
                q.append(w)
            if dist[w] == dist[u] + 1:
                sigma[w] += sigma[u]
    return dist, sigma


def _brute(adj):
    n = adj.shape[0]
    info = [_bfs(adj, s) for s in range(n)]
    btw = np.zeros(n)
    for s, t in itertools.combinations(range(n), 2):
        ds, ss = info[s]
        if t not in ds:
            continue
        for v in range(n):
            if v in (s, t) or v not in ds:
                continue
            dv, sv = info[v]
            if t in dv and ds[v] + dv[t] == ds[t]:
                btw[v] += ss[v] * sv[t] / ss[t]
    norm = (n - 1) * (n - 2) / 2
    btw = btw / norm if norm else btw
    connected = all(len(d) == n for d, _ in info)
    if connected:
        clo = np.array([(n - 1) / sum(d.values()) if n > 1 else 0.0 for d, _ in info])
    else:
        clo = np.array([sum(1 / x for x in d.values() if x) / (n - 1) for d, _ in info])
    deg = adj.sum(axis=1) / (n - 1)
    return btw, clo, deg


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_centralities_match_brute_force(n, p, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    g = graph_of(n, edges)
    cent, conv = bench.centralities(g)
    btw, clo, deg = _brute(g.adjacency)
    assert np.allclose(cent["betweenness"], btw, atol=1e-12)
    assert np.allclose(cent["closeness"], clo, atol=1e-12)
    assert np.allclose(cent["degree"], deg, atol=1e-12)
    assert conv == ("standard" if len(_bfs(g.adjacency, 0)[0]) == n else "harmonic")


def test_centrality_report_joins_ratios():
    suite = gen_suite(GenSpec(n=(5,), p_components=(0.3,), instance_layers=2))
    cfg = bench.SweepConfig(solver=FAST, kinds=("config",), solvers=("tsc-dsatur",), breach_sample="per-asset")
    rows = bench.sweep(suite, cfg)
    recs = bench.centrality_report(rows, suite)
    assert [r.scenario for r in recs] == [m.name for m in suite]
    for r in recs:
        mine = [x.risk_ratio for x in rows if x.scenario == r.scenario]
        assert r.mean_ratio == pytest.approx(np.mean(mine))
    assert bench.centrality_csv(recs).startswith("# closeness convention")
