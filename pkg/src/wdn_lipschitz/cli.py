"""Command-line front end.

Subcommands:

    analyze      one network: analytical constant, optional certified
                 interval upper bounds and sampled lower bounds
    benchmark    a directory of fixture networks: one CSV row per network
                 plus optional per-method timing medians
    convergence  sampled lower bound as a function of the sample count

Exit codes: 0 success, 2 input-file (INP) error, 3 bounds-file error,
4 modelling-assumption violation, 1 other failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import statistics
import sys
import time
from pathlib import Path

from . import analytical, bnb, sampling
from .bounds import FlowBox, default_box, load_bounds
from .errors import AssumptionError, BoundsError, InpError, WdnError
from .inp import parse_inp
from .network import Network, build_network
from .report import AnalysisReport

BENCHMARK_ORDER = ("three_node", "eight_node", "anytown", "net2", "net3", "obcl")

# per-network optimality gaps for the interval method (benchmark defaults)
BENCHMARK_GAPS = {
    "three_node": 1e-2,
    "eight_node": 1e-2,
    "anytown": 1e-5,
    "net2": 1e-5,
    "net3": 2e-3,
    "obcl": 8e-2,
}
FALLBACK_GAP = 1e-3


def _read_network(inp_path: Path) -> tuple[str, Network]:
    try:
        text = inp_path.read_text()
    except OSError as exc:
        raise InpError(f"cannot read {inp_path}: {exc}") from None
    desc = parse_inp(text)
    return inp_path.stem, build_network(desc)


def _read_box(args, net: Network) -> tuple[FlowBox, str]:
    if getattr(args, "default_bounds", False):
        return default_box(net), "default"
    if args.bounds is None:
        raise BoundsError("no bounds file given (use --bounds FILE or --default-bounds)")
    path = Path(args.bounds)
    try:
        box = load_bounds(path, net)
    except OSError as exc:
        raise BoundsError(f"cannot read {path}: {exc}") from None
    return box, str(path)


def _timed(fn, *fn_args, **fn_kwargs):
    t0 = time.perf_counter()
    value = fn(*fn_args, **fn_kwargs)
    return value, time.perf_counter() - t0


def _run_methods(net: Network, box: FlowBox, methods: set[str], modes: set[str],
                 gap: float, max_boxes: int, samples: int, sampler: str,
                 seed: int, report: AnalysisReport) -> None:
    est, sec = _timed(analytical.k_network, net, box)
    report.add("analytical", est, sec)
    if "osl" in methods:
        est, sec = _timed(analytical.osl_network, net, box)
        report.add("osl", est, sec)
    if "interval" in methods:
        if "max" in modes:
            est, sec = _timed(bnb.k_upper_max, net, box, gap, max_boxes)
            report.add("interval_max", est, sec)
        if "sqrt" in modes:
            est, sec = _timed(bnb.k_upper_sqrt, net, box, gap, max_boxes)
            report.add("interval_sqrt", est, sec)
    if "point" in methods:
        if "max" in modes:
            est, sec = _timed(sampling.k_lower, net, box, sampler, samples,
                              mode="max", seed=seed)
            report.add("point_max", est, sec)
        if "sqrt" in modes:
            est, sec = _timed(sampling.k_lower, net, box, sampler, samples,
                              mode="sqrt", seed=seed)
            report.add("point_sqrt", est, sec)


def cmd_analyze(args) -> int:
    name, net = _read_network(Path(args.inp))
    box, bounds_src = _read_box(args, net)
    methods = {m.strip() for m in args.methods.split(",") if m.strip()}
    unknown = methods - {"analytical", "osl", "interval", "point"}
    if unknown:
        raise InpError(f"unknown methods: {sorted(unknown)}")
    modes = {"max", "sqrt"} if args.mode == "both" else {args.mode}

    gap = args.gap if args.gap is not None else FALLBACK_GAP
    config = {
        "gap": gap,
        "max_boxes": args.max_boxes,
        "samples": args.samples,
        "sampler": args.sampler,
        "seed": args.seed,
        "mode": args.mode,
        "bounds": bounds_src,
    }
    report = AnalysisReport.for_network(name, net, config)
    report.warnings = list(net.desc.warnings)
    _run_methods(net, box, methods, modes, gap, args.max_boxes,
                 args.samples, args.sampler, args.seed, report)

    if args.out:
        Path(args.out).write_text(report.to_json() + "\n")
    if args.format == "json":
        print(report.to_json())
    elif args.format == "csv":
        row = report.to_csv_row()
        writer = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
    else:
        sys.stdout.write(report.to_table())
    return 0


def _discover_fixtures(fixture_dir: Path, wanted: list[str] | None) -> list[tuple[str, Path, Path]]:
    found = {}
    for inp_path in sorted(fixture_dir.glob("*.inp")):
        bounds_path = inp_path.with_name(inp_path.stem + "_bounds.csv")
        found[inp_path.stem] = (inp_path, bounds_path)
    names = list(found)
    ordered = [n for n in BENCHMARK_ORDER if n in found]
    ordered += sorted(n for n in names if n not in BENCHMARK_ORDER)
    if wanted is not None:
        missing = [n for n in wanted if n not in found]
        if missing:
            raise InpError(f"networks not found in {fixture_dir}: {missing}")
        ordered = [n for n in ordered if n in wanted]
    return [(n, found[n][0], found[n][1]) for n in ordered]


def cmd_benchmark(args) -> int:
    fixture_dir = Path(args.fixture_dir)
    if not fixture_dir.is_dir():
        raise InpError(f"{fixture_dir} is not a directory")
    wanted = None
    if args.networks:
        wanted = [n.strip() for n in args.networks.split(",") if n.strip()]
    fixtures = _discover_fixtures(fixture_dir, wanted)

    estimate_cols = ("analytical", "point_max", "point_sqrt",
                     "interval_max", "interval_sqrt")
    fields = ["network", "junctions", "reservoirs", "tanks", "pipes", "pumps",
              "valves", *estimate_cols, "status"]
    rows = []
    timing_rows = []
    for name, inp_path, bounds_path in fixtures:
        try:
            _, net = _read_network(inp_path)
            box = load_bounds(bounds_path, net)
            gap = args.gap if args.gap is not None else BENCHMARK_GAPS.get(name, FALLBACK_GAP)
            runs: dict[str, list[float]] = {}
            report = None
            for _ in range(max(1, args.repeats)):
                rep = AnalysisReport.for_network(name, net, {})
                _run_methods(net, box, {"interval", "point"}, {"max", "sqrt"},
                             gap, args.max_boxes, args.samples, args.sampler,
                             args.seed, rep)
                for key, sec in rep.timings_s.items():
                    runs.setdefault(key, []).append(sec)
                if report is None:
                    report = rep
            row = report.to_csv_row(estimate_cols)
            row["status"] = "ok"
            rows.append(row)
            for key, secs in runs.items():
                timing_rows.append({
                    "network": name,
                    "method": key,
                    "median_s": repr(statistics.median(secs)),
                    "runs": str(len(secs)),
                })
        except WdnError as exc:
            row = {f: "" for f in fields}
            row["network"] = name
            row["status"] = f"error: {type(exc).__name__}: {exc}"
            rows.append(row)

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buffer.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)

    if args.timing_out:
        with open(args.timing_out, "w", newline="\n") as fh:
            tw = csv.DictWriter(fh, fieldnames=["network", "method", "median_s", "runs"],
                                lineterminator="\n")
            tw.writeheader()
            for row in timing_rows:
                tw.writerow(row)
    return 0


def cmd_convergence(args) -> int:
    _, net = _read_network(Path(args.inp))
    box, _ = _read_box(args, net)
    samplers = [s.strip() for s in args.samplers.split(",") if s.strip()]
    for s in samplers:
        if s not in sampling.SAMPLER_KINDS:
            raise InpError(f"unknown sampler {s!r}")
    grid = sorted({int(tok) for tok in args.n_grid.split(",") if tok.strip()})
    if not grid or grid[0] < 1:
        raise InpError("--n-grid must list positive integers")

    out = sys.stdout if not args.out else open(args.out, "w", newline="\n")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "sampler", "mode", "estimate"])
        for sampler in samplers:
            _, trace = sampling.k_lower_trace(
                net, box, sampler, grid[-1], mode=args.mode, seed=args.seed,
                checkpoints=tuple(grid),
            )
            for n, estimate in trace:
                writer.writerow([n, sampler, args.mode, repr(estimate)])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdn-lipschitz",
        description="Lipschitz constants of water-network hydraulics: closed "
                    "form, certified interval upper bounds, sampled lower bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, bounds: bool = True) -> None:
        if bounds:
            group = p.add_mutually_exclusive_group()
            group.add_argument("--bounds", help="flow bounds CSV (link_id,q_min,q_max)")
            group.add_argument("--default-bounds", action="store_true",
                               help="derive bounds from pump maximum flows")
        p.add_argument("--gap", type=float, default=None,
                       help="interval method optimality gap (default: 1e-3; "
                            "benchmark uses per-network defaults)")
        p.add_argument("--max-boxes", type=int, default=bnb.DEFAULT_MAX_BOXES,
                       help="interval method box budget (default %(default)s)")
        p.add_argument("--samples", type=int, default=100_000,
                       help="point method sample count (default %(default)s)")
        p.add_argument("--sampler", choices=sampling.SAMPLER_KINDS, default="sobol",
                       help="point method sampler (default %(default)s)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for the random sampler (default %(default)s)")

    p_analyze = sub.add_parser("analyze", help="analyze one network")
    p_analyze.add_argument("inp", help="EPANET-style INP file")
    common(p_analyze)
    p_analyze.add_argument("--methods", default="analytical",
                           help="comma list of analytical,osl,interval,point "
                                "(analytical always runs; default %(default)s)")
    p_analyze.add_argument("--mode", choices=["max", "sqrt", "both"], default="both",
                           help="objective mode for interval/point methods")
    p_analyze.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p_analyze.add_argument("--out", help="also write the JSON report here")
    p_analyze.set_defaults(fn=cmd_analyze)

    p_bench = sub.add_parser("benchmark", help="run the fixture benchmark")
    p_bench.add_argument("fixture_dir", help="directory of <name>.inp and <name>_bounds.csv")
    p_bench.add_argument("--networks", help="comma list of fixture names to run")
    common(p_bench, bounds=False)
    p_bench.add_argument("--repeats", type=int, default=5,
                         help="timing repetitions, median reported (default %(default)s)")
    p_bench.add_argument("--out", help="results CSV path (default: stdout)")
    p_bench.add_argument("--timing-out", help="per-method timing CSV path")
    p_bench.set_defaults(fn=cmd_benchmark)

    p_conv = sub.add_parser("convergence", help="sampled estimate vs sample count")
    p_conv.add_argument("inp", help="EPANET-style INP file")
    common(p_conv)
    p_conv.add_argument("--samplers", default="random,halton,sobol",
                        help="comma list of samplers (default %(default)s)")
    p_conv.add_argument("--n-grid", default="10,100,1000,10000,100000",
                        help="comma list of sample counts (default %(default)s)")
    p_conv.add_argument("--mode", choices=["max", "sqrt"], default="max")
    p_conv.add_argument("--out", help="trace CSV path (default: stdout)")
    p_conv.set_defaults(fn=cmd_convergence)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except AssumptionError as exc:
        print(f"assumption violation: {exc}", file=sys.stderr)
        return 4
    except InpError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except BoundsError as exc:
        print(f"bounds error: {exc}", file=sys.stderr)
        return 3
    except WdnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
