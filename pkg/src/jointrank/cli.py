"""Command-line interface.

Subcommands: synth, code-events, code-consumption, ordinate, distances,
joint, detect, pipeline, bench. Exit codes: 0 success, 2 configuration
error, 3 data/format error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import io
from .coding import DateWindow, code_consumption, code_events, double_log_transform
from .distance import ordinal_distances
from .errors import (AnalysisError, ConfigError, InvalidPartition,
                     NumericalFailure, StageError)
from .joint import align_common_cases, detect_anomalies, joint_density, rank_distances
from .ordination import ordinate_ca, ordinate_pca, scree
from .pipeline import PipelineConfig, run_pipeline
from .synth import SyntheticSpec, generate_synthetic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _date(text):
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _window(args):
    return DateWindow(args.start, args.end)


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(args):
    spec = SyntheticSpec(
        case_count=args.m,
        event_code_count=args.codes,
        anomaly_fraction=args.anomaly_fraction,
        seed=args.seed,
        days=args.days,
        event_rate=args.event_rate,
        anomaly_mode=args.anomaly_mode,
    )
    paths = generate_synthetic(spec, args.out)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_code_events(args):
    records = io.parse_events_csv(args.input)
    coded, report = code_events(records, _window(args))
    if args.double_log:
        coded = double_log_transform(coded)
    io.write_coded_matrix_csv(coded, args.out)
    if report.dropped_cases or report.dropped_variables:
        print(f"dropped cases: {report.dropped_cases}", file=sys.stderr)
        print(f"dropped variables: {report.dropped_variables}", file=sys.stderr)
    return EXIT_OK


def cmd_code_consumption(args):
    records = io.parse_consumption_csv(args.input)
    coded, report = code_consumption(records, _window(args))
    io.write_coded_matrix_csv(coded, args.out)
    if report.dropped_cases or report.imputed_cases:
        print(f"dropped cases: {report.dropped_cases}", file=sys.stderr)
        print(f"imputed cases: {report.imputed_cases}", file=sys.stderr)
    return EXIT_OK


def cmd_ordinate(args):
    coded = io.read_coded_matrix_csv(args.input)
    if args.double_log:
        coded = double_log_transform(coded)
    ordn = ordinate_ca(coded) if args.method == "ca" else ordinate_pca(coded)
    out = _out_dir(args)
    io.write_scree_csv(scree(ordn), out / "scree.csv")
    io.write_coordinates_csv(ordn.case_ids, ordn.F, out / "coords_F.csv")
    io.write_coordinates_csv(ordn.variable_names, ordn.V, out / "coords_V.csv",
                             label_name="variable")
    return EXIT_OK


def cmd_distances(args):
    import pandas as pd

    df = pd.read_csv(args.input)
    F = df.iloc[:, 1:].to_numpy(dtype=np.float64)
    k = args.k if args.k is not None else F.shape[1]
    dv = ordinal_distances(F, k, case_ids=df.iloc[:, 0].astype(str).tolist())
    io.write_distances_csv(dv, args.out)
    return EXIT_OK


def cmd_joint(args):
    dv_a = io.read_distances_csv(args.a)
    dv_b = io.read_distances_csv(args.b)
    common, d_a, d_b = align_common_cases(dv_a, dv_b)
    ra = rank_distances(d_a, case_ids=common)
    rb = rank_distances(d_b, case_ids=common)
    jrd = joint_density(ra.ranks, rb.ranks, grid_size=args.grid_size,
                        bandwidth=args.bandwidth, case_ids=common)
    out = _out_dir(args)
    io.write_joint_cases_csv(jrd, out / "joint_cases.csv")
    io.write_density_grid_csv(jrd, out / "density_grid.csv")
    return EXIT_OK


def cmd_detect(args):
    jrd = io.read_joint_cases_csv(args.input)
    report = detect_anomalies(jrd, threshold=args.threshold,
                              quadrant_filter=args.quadrant_filter,
                              two_sided=args.two_sided)
    io.write_report_json(report, args.out)
    print(f"flagged {len(report.flagged)} of {report.total_cases} cases")
    return EXIT_OK


def cmd_pipeline(args):
    overrides = {
        "event_input": args.events,
        "consumption_input": args.consumption,
        "seed": args.seed,
        "out_dir": args.out,
        "threshold": args.threshold,
    }
    if args.config:
        config = PipelineConfig.from_json(args.config, **overrides)
    else:
        config = PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})
    report = run_pipeline(config)
    print(f"flagged {len(report.flagged)} of {report.total_cases} cases "
          f"(threshold {report.threshold} std)")
    return EXIT_OK


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    results = bench_mod.bench(sizes, cols=args.cols, repeats=args.repeats,
                              seed=args.seed)
    bench_mod.write_bench_csv(results, args.out)
    for r in results:
        status = f"skipped({r.skipped})" if r.skipped else f"{r.median_seconds:.6f}s"
        print(f"{r.strategy:<12} rows={r.rows:<8} {status}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="jointrank",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate labeled synthetic data")
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--codes", type=int, default=200)
    p.add_argument("--anomaly-fraction", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--days", type=int, default=14)
    p.add_argument("--event-rate", type=float, default=40.0)
    p.add_argument("--anomaly-mode", choices=["both", "events", "consumption"],
                   default="both")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    for name, func in (("code-events", cmd_code_events),
                       ("code-consumption", cmd_code_consumption)):
        p = sub.add_parser(name, help=f"{name.replace('-', ' ')} into a coded matrix")
        p.add_argument("--input", required=True)
        p.add_argument("--start", type=_date, required=True)
        p.add_argument("--end", type=_date, required=True)
        p.add_argument("--out", required=True)
        if name == "code-events":
            p.add_argument("--double-log", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("ordinate", help="CA or PCA of a coded matrix CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["ca", "pca"], required=True)
    p.add_argument("--double-log", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ordinate)

    p = sub.add_parser("distances", help="ordinal distances from coordinates CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("joint", help="joint rank density of two distance files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("detect", help="threshold a joint_cases.csv into a report")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, default=2.0)
    p.add_argument("--quadrant-filter", type=float, default=None)
    p.add_argument("--two-sided", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("pipeline", help="run the full five-stage pipeline")
    p.add_argument("--config", default=None)
    p.add_argument("--events", default=None)
    p.add_argument("--consumption", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("bench", help="benchmark the three scaling strategies")
    p.add_argument("--sizes", required=True, help="comma-separated row counts")
    p.add_argument("--cols", type=int, default=100)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.cause if isinstance(exc, StageError) else exc
        if isinstance(cause, (ConfigError, InvalidPartition)):
            return EXIT_CONFIG
        if isinstance(cause, NumericalFailure):
            return EXIT_NUMERIC
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
