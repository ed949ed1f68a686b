"""``react-bench``: generate suites, attack one scenario, sweep, report.

Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import bench
from .generate import GenSpec, gen_suite, read_suite, write_suite
from .model import ScenarioError, load
from .projection import ProjectionKind
from .solvers import SOLVER_IDS, PaletteTooSmall, SolverConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _projection(value: str) -> str:
    try:
        return ProjectionKind.parse(value).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(value: str) -> int:
    v = int(value)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="react-bench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a seeded scenario suite and its manifest")
    g.add_argument("--spec", help="JSON file with generator fields (flags below override it)")
    g.add_argument("--n", type=_positive, nargs="+")
    g.add_argument("--p", type=float, nargs="+", dest="p_components")
    g.add_argument("--p-assets", type=float)
    g.add_argument("--layers", type=_positive, dest="instance_layers")
    g.add_argument("--configs", type=_positive, dest="config_count")
    g.add_argument("--segments", type=_positive, dest="segment_count")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)

    a = sub.add_parser("attack", help="recolor one scenario after one component is compromised")
    a.add_argument("--scenario", required=True)
    a.add_argument("--component", type=int, required=True)
    a.add_argument("--projection", type=_projection, required=True)
    a.add_argument("--solver", choices=SOLVER_IDS, required=True)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--iterations", type=_positive, default=SolverConfig.iterations)
    a.add_argument("--palette", type=_positive, help="grow the recolorable set to this many entries first")
    a.add_argument("--contagion", choices=("min", "max"), default="min")
    a.add_argument("--out", help="write the JSON result here instead of stdout")

    s = sub.add_parser("sweep", help="run every breach of a suite through the solvers")
    s.add_argument("--suite", required=True, help="manifest.json written by generate")
    s.add_argument("--projections", type=_projection, nargs="+", default=["network", "config"])
    s.add_argument("--solvers", choices=SOLVER_IDS, nargs="+", default=list(SOLVER_IDS))
    s.add_argument("--jobs", type=_positive, default=1)
    s.add_argument("--breach-sample", choices=bench.BREACH_SAMPLES, default="all")
    s.add_argument("--palette", choices=bench.PALETTE_MODES, default="paper")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iterations", type=_positive, default=SolverConfig.iterations)
    s.add_argument("--gpbp-rounds", type=_positive, default=SolverConfig.gpbp_rounds)
    s.add_argument("--subsample", type=_positive, help="breaches per scenario for --subsample-solvers")
    s.add_argument("--subsample-solvers", choices=SOLVER_IDS, nargs="+", default=[])
    s.add_argument("--canonical-risk", choices=("network-spread",),
                   help="also score both colorings under the network-spread formula")
    s.add_argument("--out", required=True)
    s.add_argument("--quiet", action="store_true")

    r = sub.add_parser("report", help="summarize a sweep CSV")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--mode", choices=("summary", "table", "centrality", "plotdata"), required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--projection", type=_projection, default="network", help="projection shown by table mode")
    r.add_argument("--suite", help="manifest.json; needed by centrality mode")
    return ap


def _cmd_generate(args) -> None:
    base: dict = {}
    if args.spec:
        try:
            base = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read spec: {exc}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"spec is not valid JSON: {exc}") from None
        if not isinstance(base, dict):
            raise DataError("spec must be a JSON object")
    for key in ("n", "p_components", "p_assets", "instance_layers", "config_count", "segment_count", "seed"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    try:
        spec = GenSpec.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad generator settings: {exc}") from None
    path = write_suite(gen_suite(spec), args.out, spec)
    print(path)


def _cmd_attack(args) -> None:
    sc = load(args.scenario)
    if args.component not in sc.component_index:
        raise DataError(f"component {args.component} is not in the scenario")
    cfg = SolverConfig(seed=args.seed, iterations=args.iterations, contagion=args.contagion)
    row = bench.run_breach(sc, args.component, args.projection, args.solver, cfg, palette=args.palette)
    text = json.dumps(asdict(row), indent=1) + "\n"
    if args.out:
        bench.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _cmd_sweep(args) -> None:
    suite = read_suite(args.suite)
    if not suite:
        raise DataError("suite manifest lists no scenarios")
    cfg = bench.SweepConfig(
        solver=SolverConfig(seed=args.seed, iterations=args.iterations, gpbp_rounds=args.gpbp_rounds),
        kinds=tuple(args.projections), solvers=tuple(args.solvers), breach_sample=args.breach_sample,
        palette=args.palette, canonical_risk=args.canonical_risk is not None,
        subsample_solvers=tuple(args.subsample_solvers), subsample=args.subsample,
    )

    def progress(done, total):
        if not args.quiet:
            print(f"\r{done}/{total} scenario projections", end="" if done < total else "\n", file=sys.stderr)

    rows = bench.sweep(suite, cfg, jobs=args.jobs, progress=progress)
    bench.emit(rows, "csv", args.out)
    bad = sum(not r.ok for r in rows)
    print(f"{len(rows)} rows, {bad} failed -> {args.out}", file=sys.stderr)


def _cmd_report(args) -> None:
    rows = bench.read_csv(args.inp)
    summary = bench.summarize(rows)
    if args.mode == "summary":
        bench.emit(summary, "csv", args.out)
    elif args.mode == "table":
        bench.write_text(args.out, bench.render_table(summary, args.projection))
    elif args.mode == "plotdata":
        bench.emit(summary, "plotdata", args.out)
    else:
        if not args.suite:
            raise UsageError("centrality mode needs --suite")
        records = bench.centrality_report(rows, read_suite(args.suite))
        bench.write_text(args.out, bench.centrality_csv(records))


_COMMANDS = {"generate": _cmd_generate, "attack": _cmd_attack, "sweep": _cmd_sweep, "report": _cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"react-bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ScenarioError, bench.ResultsFormatError, PaletteTooSmall, OSError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"react-bench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
