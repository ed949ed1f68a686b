"""Breach sweeps, summaries, centrality joins and their file formats."""

from __future__ import annotations

import csv
import io
import math
import multiprocessing
from collections import defaultdict
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .generate import SuiteMember, extend_palette
from .model import Scenario
from .projection import ProjectionKind, apply_coloring, build_projection
from .risk import AssetAggregator, Breach, overall_risk
from .solvers import (SOLVER_IDS, SolverConfig, colors_used, dsatur_proper, solve,
                      welsh_powell)

PALETTE_MODES = ("paper", "matched", "native")
BREACH_SAMPLES = ("all", "per-asset")
KIND_ORDER = (ProjectionKind.NETWORK, ProjectionKind.CONFIG)
TIMING_NOTE = "elapsed_ms covers the solver only; projection building and risk evaluation are excluded"


@dataclass
class SweepRow:
    scenario: str
    n: int
    p: float
    layer: int
    component: int
    projection: str
    solver: str
    palette: int
    seed: int
    risk_before: float | None = None
    risk_after: float | None = None
    risk_ratio: float | None = None
    elapsed_ms: float | None = None
    iterations: int | None = None
    colors_used: int | None = None
    kept_original: bool | None = None
    canonical_before: float | None = None
    canonical_after: float | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


ROW_FIELDS = tuple(f.name for f in fields(SweepRow))
_INT_FIELDS = {"n", "layer", "component", "palette", "seed", "iterations", "colors_used"}
_FLOAT_FIELDS = {"p", "risk_before", "risk_after", "risk_ratio", "elapsed_ms", "canonical_before", "canonical_after"}


@dataclass(frozen=True)
class SweepConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    kinds: tuple[str, ...] = ("network", "config")
    solvers: tuple[str, ...] = SOLVER_IDS
    breach_sample: str = "all"
    palette: str = "paper"
    edge_floor: float = 0.0
    canonical_risk: bool = False
    # solvers listed here only see ``subsample`` evenly spaced breaches per scenario
    subsample_solvers: tuple[str, ...] = ()
    subsample: int | None = None

    def __post_init__(self):
        kinds = tuple(ProjectionKind.parse(k).value for k in self.kinds)
        object.__setattr__(self, "kinds", kinds)
        for s in self.solvers + self.subsample_solvers:
            if s not in SOLVER_IDS:
                raise ValueError(f"unknown solver {s!r}; expected one of {SOLVER_IDS}")
        if self.breach_sample not in BREACH_SAMPLES:
            raise ValueError(f"breach sample must be one of {BREACH_SAMPLES}")
        if self.palette not in PALETTE_MODES:
            raise ValueError(f"palette mode must be one of {PALETTE_MODES}")
        if self.subsample is not None and self.subsample < 1:
            raise ValueError("subsample must be positive")


def breach_set(scenario: Scenario, sample: str = "all") -> list[int]:
    """Compromised components: all of them, or the first component of each asset."""
    if sample == "all":
        return [c.id for c in scenario.components]
    if sample == "per-asset":
        first: dict[int, int] = {}
        for c in scenario.components:
            first.setdefault(c.asset_id, c.id)
        return [first[a.id] for a in scenario.assets if a.id in first]
    raise ValueError(f"breach sample must be one of {BREACH_SAMPLES}")


def spaced(items: Sequence, k: int | None) -> list:
    """``k`` evenly spaced items, always including the first."""
    if k is None or k >= len(items):
        return list(items)
    idx = np.linspace(0, len(items), k, endpoint=False).astype(int)
    return [items[i] for i in idx]


def row_seed(base: int, n: int, p: float, layer: int, component: int, kind: str, solver: str) -> int:
    key = (n, int(round(p * 1_000_000)), layer, component, KIND_ORDER.index(ProjectionKind.parse(kind)),
           SOLVER_IDS.index(solver))
    return int(np.random.SeedSequence(base, spawn_key=key).generate_state(1, np.uint32)[0])


def palette_sizes(scenario: Scenario, kind, mode: str = "paper", edge_floor: float = 0.0) -> dict[str, int]:
    """Colors offered to each solver on one projection.

    paper: guided and blind solvers keep the native palette; the proper-coloring
    baselines get as many colors as they need (n for DSATUR/WP, max degree + 1
    for GCG). matched: as paper, but every palette grows to at least the fewest
    colors DSATUR or WP needed. native: nobody gets extra colors.
    A single-color palette is never extended: there is nothing to redeploy to.
    """
    g = build_projection(scenario, kind, edge_floor)
    k = g.color_count
    if mode == "native" or k == 1:
        return {s: k for s in SOLVER_IDS}
    need_gcg = int(g.degree().max()) + 1 if g.n else 1
    base = k
    if mode == "matched":
        base = max(k, min(colors_used(dsatur_proper(g)), colors_used(welsh_powell(g))))
    out = {s: base for s in SOLVER_IDS}
    out["dsatur"] = out["wp"] = max(k, g.n)
    out["gcg"] = max(base, need_gcg)
    return out


def _canonical(scenario: Scenario, kind: ProjectionKind, coloring, source: int, cfg: SweepConfig):
    net = ProjectionKind.NETWORK
    before = overall_risk(scenario, net, source, cfg.edge_floor, cfg.solver.contagion)
    after = overall_risk(apply_coloring(scenario, kind, coloring), net, source, cfg.edge_floor, cfg.solver.contagion)
    return before, after


def run_breach(scenario: Scenario, component: int, kind, solver: str, config: SolverConfig | None = None,
               *, palette: int | None = None, edge_floor: float = 0.0, canonical_risk: bool = False,
               meta: tuple[str, int, float, int] | None = None, breach: Breach | None = None) -> SweepRow:
    """One sweep row: recolor after ``component`` is compromised and compare risks.

    ``palette`` grows the recolorable set first (configurations or segments);
    the original coloring, and so risk_before, is unaffected by that.
    """
    config = config or SolverConfig()
    kind = ProjectionKind.parse(kind)
    if component not in scenario.component_index:
        raise KeyError(f"unknown component {component}")
    if palette is not None:
        scenario = extend_palette(scenario, kind, palette)
    if breach is None:
        breach = Breach(scenario, kind, component, edge_floor, config.contagion)
    g = breach.graph
    name, n, p, layer = meta or (scenario.meta.name, scenario.meta.n or 0, scenario.meta.p or 0.0, 0)
    row = SweepRow(name, n, p, layer, component, kind.value, solver, g.color_count, config.seed)
    before = breach.risk()
    res = solve(g, solver, config, breach)
    row.risk_before = before
    row.risk_after = res.objective
    row.risk_ratio = res.objective / before
    row.elapsed_ms = res.elapsed * 1000.0
    row.iterations = res.rounds
    row.colors_used = res.colors_used
    row.kept_original = res.kept_original
    if canonical_risk:
        row.canonical_before, row.canonical_after = _canonical(scenario, kind, res.coloring, component,
                                                              SweepConfig(solver=config, edge_floor=edge_floor))
    return row


def _scenario_rows(task) -> list[SweepRow]:
    member, kind, cfg = task
    sc = member.scenario
    meta = (member.name, member.n, member.p, member.layer)
    breaches = breach_set(sc, cfg.breach_sample)
    sizes = palette_sizes(sc, kind, cfg.palette, cfg.edge_floor)
    agg = AssetAggregator(sc)
    rows: list[SweepRow] = []
    graphs: dict[int, tuple[Scenario, object]] = {}
    for solver in cfg.solvers:
        size = sizes[solver]
        if size not in graphs:
            ext = extend_palette(sc, kind, size)
            graphs[size] = (ext, build_projection(ext, kind, cfg.edge_floor))
        ext, g = graphs[size]
        todo = spaced(breaches, cfg.subsample) if solver in cfg.subsample_solvers else breaches
        for comp in todo:
            seed = row_seed(cfg.solver.seed, member.n, member.p, member.layer, comp, kind, solver)
            scfg = SolverConfig(**{**cfg.solver.__dict__, "seed": seed})
            try:
                b = Breach.on_graph(ext, g, comp, scfg.contagion, cfg.edge_floor, agg)
                row = run_breach(ext, comp, kind, solver, scfg, edge_floor=cfg.edge_floor,
                                 canonical_risk=cfg.canonical_risk, meta=meta, breach=b)
            except Exception as exc:  # recorded in-row, the sweep goes on
                row = SweepRow(member.name, member.n, member.p, member.layer, comp, kind, solver, size, seed,
                               error=f"{type(exc).__name__}: {exc}")
            rows.append(row)
    return rows


def _order_key(row: SweepRow, rank: dict[str, int]):
    return (rank[row.scenario], KIND_ORDER.index(ProjectionKind.parse(row.projection)),
            SOLVER_IDS.index(row.solver), row.component)


def sweep(suite: Sequence[SuiteMember], config: SweepConfig | None = None, jobs: int = 1,
          progress=None) -> list[SweepRow]:
    """Cross product of suite members, breaches, projections and solvers.

    Rows come back in a fixed order whatever ``jobs`` is; every row's solver
    seed is derived from the base seed and the row coordinates.
    """
    config = config or SweepConfig()
    if not suite:
        raise ValueError("suite is empty")
    tasks = [(m, kind, config) for m in suite for kind in config.kinds]
    results: list[list[SweepRow]] = []
    if jobs <= 1:
        for i, t in enumerate(tasks):
            results.append(_scenario_rows(t))
            if progress:
                progress(i + 1, len(tasks))
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            for i, rows in enumerate(pool.imap_unordered(_scenario_rows, tasks)):
                results.append(rows)
                if progress:
                    progress(i + 1, len(tasks))
    rank = {m.name: i for i, m in enumerate(suite)}
    return sorted((r for rows in results for r in rows), key=lambda r: _order_key(r, rank))


# ---------------------------------------------------------------- summaries

@dataclass(frozen=True)
class GroupStats:
    n: int
    p: float
    projection: str
    solver: str
    count: int
    mean_ratio: float
    ci95: float
    mean_ms: float


def mean_ci(values: Sequence[float]) -> tuple[float, float]:
    """Mean and 95% half-width 1.96 * population std / sqrt(k)."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        raise ValueError("no values")
    return float(a.mean()), float(1.96 * a.std() / math.sqrt(a.size))


@dataclass
class Summary:
    groups: list[GroupStats]
    category_means: dict[tuple[int, float, str], float]   # all-solver mean per (n, p, projection)
    errors: int

    def lookup(self, n: int, p: float, projection: str, solver: str) -> GroupStats | None:
        for g in self.groups:
            if (g.n, g.p, g.projection, g.solver) == (n, p, projection, solver):
                return g
        return None

    def cells(self) -> list[tuple[int, float]]:
        return sorted({(g.n, g.p) for g in self.groups})


def summarize(rows: Iterable[SweepRow]) -> Summary:
    buckets: dict[tuple, list[SweepRow]] = defaultdict(list)
    errors = 0
    for r in rows:
        if not r.ok or r.risk_ratio is None:
            errors += 1
            continue
        buckets[(r.n, r.p, r.projection, r.solver)].append(r)
    groups = []
    per_cat: dict[tuple, list[float]] = defaultdict(list)
    for (n, p, proj, solver), rs in buckets.items():
        ratios = [r.risk_ratio for r in rs]
        mean, ci = mean_ci(ratios)
        ms = float(np.mean([r.elapsed_ms for r in rs]))
        groups.append(GroupStats(n, p, proj, solver, len(rs), mean, ci, ms))
        per_cat[(n, p, proj)].extend(ratios)
    groups.sort(key=lambda g: (g.n, g.p, KIND_ORDER.index(ProjectionKind.parse(g.projection)),
                               SOLVER_IDS.index(g.solver)))
    cats = {k: float(np.mean(v)) for k, v in sorted(per_cat.items())}
    return Summary(groups, cats, errors)


TABLE_ORDER = ("dsatur", "wp", "gcg", "tsc-dsatur", "gpbp", "hc", "sa")
_TABLE_NAMES = {"dsatur": "DSATUR", "wp": "WP", "gcg": "GCG", "tsc-dsatur": "TSC-DSATUR", "gpbp": "GPBP",
                "hc": "HC", "sa": "SA"}


def _fmt_ms(ms: float) -> str:
    return "<1ms" if ms < 1.0 else f"{ms:.0f}ms"


def render_table(summary: Summary, projection: str = "network") -> str:
    """Plain-text table, one block per (n, p); the lowest mean ratio is starred."""
    projection = ProjectionKind.parse(projection).value
    lines = [f"projection: {projection}", f"{'n':>4} {'p':>5}  {'approach':<11} {'average':>8} {'CI':>7} {'time':>6}"]
    for n, p in summary.cells():
        block = [summary.lookup(n, p, projection, s) for s in TABLE_ORDER]
        block = [g for g in block if g is not None]
        if not block:
            continue
        best = min(g.mean_ratio for g in block)
        for i, g in enumerate(block):
            mark = "*" if g.mean_ratio == best else " "
            head = f"{n:>4} {p:>5g}" if i == 0 else " " * 10
            lines.append(f"{head}  {_TABLE_NAMES[g.solver]:<11} {g.mean_ratio:>8.4f}{mark}{g.ci95:>7.4f} "
                         f"{_fmt_ms(g.mean_ms):>6}")
    lines.append(f"* lowest mean ratio in block; {TIMING_NOTE}")
    return "\n".join(lines) + "\n"


def render_summary(summary: Summary) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "p", "projection", "solver", "count", "mean_ratio", "ci95", "mean_ms", "category_mean"])
    for g in summary.groups:
        w.writerow([g.n, g.p, g.projection, g.solver, g.count, repr(g.mean_ratio), repr(g.ci95), repr(g.mean_ms),
                    repr(summary.category_means[(g.n, g.p, g.projection)])])
    return out.getvalue()


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    from scipy.stats import spearmanr

    if len(x) < 2:
        return float("nan")
    return float(spearmanr(x, y).statistic)


def np_table(summary: Summary) -> list[dict]:
    """Mean ratio against the product n*p, one record per (projection, solver, cell)."""
    return [{"n": g.n, "p": g.p, "np": g.n * g.p, "projection": g.projection, "solver": g.solver,
             "mean_ratio": g.mean_ratio, "ci95": g.ci95} for g in summary.groups]


# ---------------------------------------------------------------- centrality

CENTRALITIES = ("betweenness", "closeness", "degree", "eigenvector")


def eigenvector_centrality(adj: np.ndarray) -> np.ndarray:
    """Leading eigenvector of a symmetric adjacency matrix, non-negative, unit length."""
    n = adj.shape[0]
    if n == 0:
        return np.zeros(0)
    vals, vecs = np.linalg.eigh(adj)
    v = np.abs(vecs[:, int(np.argmax(vals))])
    return v / np.linalg.norm(v)


def centralities(graph) -> tuple[dict[str, np.ndarray], str]:
    """Four node centralities on the unweighted projection graph.

    Closeness uses the standard normalized form on connected graphs and the
    harmonic form otherwise; the convention used is returned alongside.
    """
    import networkx as nx

    n = graph.n
    G = nx.Graph()
    G.add_nodes_from(range(n))
    iu, ju, _ = graph.edge_arrays()
    G.add_edges_from(zip(iu.tolist(), ju.tolist()))
    connected = n > 0 and nx.is_connected(G)
    if connected:
        clo = nx.closeness_centrality(G)
        conv = "standard"
    else:
        h = nx.harmonic_centrality(G)
        clo = {v: (h[v] / (n - 1) if n > 1 else 0.0) for v in G}
        conv = "harmonic"
    out = {
        "betweenness": np.array([nx.betweenness_centrality(G, normalized=True)[v] for v in range(n)])
        if n else np.zeros(0),
        "closeness": np.array([clo[v] for v in range(n)]),
        "degree": np.array([d for _, d in sorted(nx.degree_centrality(G).items())]) if n > 1 else np.zeros(n),
        "eigenvector": eigenvector_centrality(nx.to_numpy_array(G, nodelist=range(n))),
    }
    return out, conv


@dataclass(frozen=True)
class CentralityRecord:
    scenario: str
    n: int
    p: float
    layer: int
    projection: str
    solver: str
    mean_ratio: float
    betweenness: float
    closeness: float
    degree: float
    eigenvector: float
    closeness_convention: str


def centrality_report(rows: Iterable[SweepRow], scenarios: Sequence[SuiteMember]) -> list[CentralityRecord]:
    """Per-scenario centrality means on the unweighted configuration-spread
    graph, joined with each (projection, solver) mean risk ratio."""
    ratios: dict[tuple, list[float]] = defaultdict(list)
    for r in rows:
        if r.ok and r.risk_ratio is not None:
            ratios[(r.scenario, r.projection, r.solver)].append(r.risk_ratio)
    by_name = {m.name: m for m in scenarios}
    cache: dict[str, tuple[dict[str, float], str]] = {}
    out = []
    for (name, proj, solver), vals in sorted(ratios.items(), key=lambda kv: (kv[0][0], kv[0][1],
                                                                           SOLVER_IDS.index(kv[0][2]))):
        if name not in by_name:
            continue
        m = by_name[name]
        if name not in cache:
            cent, conv = centralities(build_projection(m.scenario, ProjectionKind.CONFIG))
            cache[name] = ({k: float(v.mean()) if v.size else 0.0 for k, v in cent.items()}, conv)
        means, conv = cache[name]
        out.append(CentralityRecord(name, m.n, m.p, m.layer, proj, solver, float(np.mean(vals)),
                                    closeness_convention=conv, **means))
    return out


# ---------------------------------------------------------------- file formats

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable[SweepRow], drop: Sequence[str] = ()) -> str:
    cols = [c for c in ROW_FIELDS if c not in drop]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(getattr(r, c)) for c in cols])
    return out.getvalue()


def _parse(name: str, text: str):
    if name == "error" or name in ("scenario", "projection", "solver"):
        return text
    if text == "":
        return None
    if name == "kept_original":
        return text == "true"
    if name in _INT_FIELDS:
        return int(text)
    if name in _FLOAT_FIELDS:
        return float(text)
    return text


class ResultsFormatError(ValueError):
    pass


def read_csv(path) -> list[SweepRow]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ResultsFormatError("empty results file") from None
    missing = set(ROW_FIELDS) - set(header)
    if missing:
        raise ResultsFormatError(f"results file lacks columns {sorted(missing)}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(header):
            raise ResultsFormatError(f"line {lineno}: expected {len(header)} cells, got {len(rec)}")
        d = dict(zip(header, rec))
        try:
            rows.append(SweepRow(**{k: _parse(k, d[k]) for k in ROW_FIELDS}))
        except ValueError as exc:
            raise ResultsFormatError(f"line {lineno}: {exc}") from None
    return rows


def plotdata(summary: Summary, centrality: Sequence[CentralityRecord] = ()) -> str:
    """Tidy records: figure, n, p, np, projection, solver, metric, value."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["figure", "n", "p", "np", "projection", "solver", "metric", "value"])
    for g in summary.groups:
        fig_ratio = "risk_network" if g.projection == "network" else "risk_config"
        fig_time = "time_network" if g.projection == "network" else "time_config"
        base = [g.n, g.p, repr(g.n * g.p), g.projection, g.solver]
        w.writerow([fig_ratio, *base, "mean_ratio", repr(g.mean_ratio)])
        w.writerow([fig_ratio, *base, "ci95", repr(g.ci95)])
        w.writerow([fig_time, *base, "mean_ms", repr(g.mean_ms)])
        w.writerow(["np_trend", *base, "mean_ratio", repr(g.mean_ratio)])
    for c in centrality:
        base = [c.n, c.p, repr(c.n * c.p), c.projection, c.solver]
        for metric in CENTRALITIES:
            w.writerow([f"centrality_{metric}", *base, metric, repr(getattr(c, metric))])
            w.writerow([f"centrality_{metric}", *base, "mean_ratio", repr(c.mean_ratio)])
    return out.getvalue()


def centrality_csv(records: Sequence[CentralityRecord]) -> str:
    out = io.StringIO()
    conv = sorted({r.closeness_convention for r in records}) or ["standard"]
    out.write(f"# closeness convention: {'/'.join(conv)} (harmonic on disconnected graphs)\n")
    w = csv.writer(out, lineterminator="\n")
    names = [f.name for f in fields(CentralityRecord)]
    w.writerow(names)
    for r in records:
        w.writerow([_cell(getattr(r, k)) for k in names])
    return out.getvalue()


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def emit(obj, fmt: str, path=None) -> str:
    """Render a sweep (list of rows), a :class:`Summary` or centrality records.

    Returns the text; also writes it when ``path`` is given.
    """
    if fmt == "csv":
        if isinstance(obj, Summary):
            text = render_summary(obj)
        elif obj and isinstance(obj[0], CentralityRecord):
            text = centrality_csv(obj)
        else:
            text = rows_to_csv(obj)
    elif fmt == "table":
        text = render_table(obj if isinstance(obj, Summary) else summarize(obj))
    elif fmt == "plotdata":
        text = plotdata(obj if isinstance(obj, Summary) else summarize(obj))
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv, table or plotdata")
    if path is not None:
        write_text(path, text)
    return text
