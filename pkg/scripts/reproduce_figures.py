"""Risk-reduction, timing, np-trend and centrality data for the default suite.

Runs every solver on both projections. HC, SA and GPBP dominate the cost, so
``--subsample K`` limits them to K evenly spaced breaches per scenario (omit it
for the full experiment, which takes hours on one core).

    python scripts/reproduce_figures.py --subsample 2 --jobs 8 --out results/figures
"""

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from react_resilience import bench
from react_resilience.generate import GenSpec, gen_suite
from react_resilience.solvers import SOLVER_IDS, SolverConfig


@dataclass(frozen=True)
class FigureRun:
    out: Path
    seed: int = 0
    jobs: int = 1
    subsample: int | None = None
    breach_sample: str = "per-asset"
    palette: str = "paper"


def run(cfg: FigureRun) -> None:
    suite = gen_suite(GenSpec())
    expensive = ("gpbp", "hc", "sa") if cfg.subsample else ()
    sweep_cfg = bench.SweepConfig(solver=SolverConfig(seed=cfg.seed), solvers=SOLVER_IDS,
                                  breach_sample=cfg.breach_sample, palette=cfg.palette,
                                  subsample_solvers=expensive, subsample=cfg.subsample)
    rows = bench.sweep(suite, sweep_cfg, jobs=cfg.jobs,
                       progress=lambda d, t: print(f"\r{d}/{t}", end="", flush=True))
    print()
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    bench.emit(rows, "csv", out / "rows.csv")
    summary = bench.summarize(rows)
    bench.emit(summary, "csv", out / "summary.csv")
    records = bench.centrality_report(rows, suite)
    bench.write_text(out / "plotdata.csv", bench.plotdata(summary, records))
    bench.write_text(out / "centrality.csv", bench.centrality_csv(records))
    for kind in ("network", "config"):
        bench.write_text(out / f"table_{kind}.txt", bench.render_table(summary, kind))
    trend = {}
    for kind in ("network", "config"):
        for s in SOLVER_IDS:
            pts = sorted((g.n * g.p, g.mean_ratio) for g in summary.groups if g.projection == kind and g.solver == s)
            if len(pts) > 1:
                trend[f"{kind}/{s}"] = bench.spearman(*zip(*pts))
    (out / "np_spearman.json").write_text(json.dumps({"config": asdict(cfg) | {"out": str(out)}, "spearman": trend},
                                                     indent=1) + "\n")
    print(bench.render_summary(summary))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/figures"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--subsample", type=int)
    ap.add_argument("--breach-sample", default="per-asset", choices=bench.BREACH_SAMPLES)
    ap.add_argument("--palette", default="paper", choices=bench.PALETTE_MODES)
    a = ap.parse_args()
    run(FigureRun(a.out, a.seed, a.jobs, a.subsample, a.breach_sample, a.palette))
