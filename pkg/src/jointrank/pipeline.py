"""End-to-end orchestration of the five-stage workflow.

S1 partition the variables (by data type, or at random with repetitions),
S2 code and ordinate each partition (events: frequency counts, double-log,
CA; consumption: day-of-week means, PCA), S3 apply a stopping rule and
compute per-case distances, S4 align common cases, rank, and estimate the
joint-rank density, S5 standardize and flag anomalies.

Every stage failure is re-raised as a StageError tagged S1..S5. All
artifacts are written with fixed numeric formats, so identical inputs and
configuration reproduce identical bytes.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import io
from .coding import (CodedMatrix, DateWindow, PartitionSpec, WEEKDAY_NAMES,
                     double_log_transform, random_partition)
from .distance import choose_k, ordinal_distances
from .errors import ConfigError, InvalidInput, StageError
from .joint import (AnomalyReport, JointRankDensity, align_common_cases,
                    detect_anomalies, joint_density, rank_distances)
from .ordination import ordinate_ca, ordinate_pca, scree

DEFAULT_GRID_SIZE = 100
DEFAULT_THRESHOLD = 2.0


@dataclass
class PipelineConfig:
    """Everything needed for one pipeline run."""

    event_input: str = ""
    consumption_input: str = ""
    window_start: dt.date | None = None
    window_end: dt.date | None = None
    stopping_rule_events: str = "kaiser"
    stopping_rule_consumption: str = "kaiser"
    bandwidth: float | None = None          # default m/50 at run time
    grid_size: int = DEFAULT_GRID_SIZE
    threshold: float = DEFAULT_THRESHOLD
    quadrant_filter: float | None = None
    two_sided: bool = False
    partition_mode: str = "by-type"
    part_count: int = 2
    repetitions: int = 1
    seed: int = 0
    out_dir: str = "out"

    def __post_init__(self):
        if self.partition_mode not in ("by-type", "random"):
            raise ConfigError(f"unknown partition mode {self.partition_mode!r}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not np.isfinite(self.threshold):
            raise ConfigError("threshold must be finite")
        if self.partition_mode == "by-type" and not (self.event_input and self.consumption_input):
            raise ConfigError("by-type mode needs both event and consumption inputs")
        if self.partition_mode == "random" and not self.event_input:
            raise ConfigError("random mode needs an event input")
        for key in ("window_start", "window_end"):
            val = getattr(self, key)
            if isinstance(val, str):
                try:
                    setattr(self, key, dt.date.fromisoformat(val))
                except ValueError as exc:
                    raise ConfigError(f"bad {key}: {exc}") from exc

    @classmethod
    def from_json(cls, path, **overrides):
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def parameters(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("window_start", "window_end"):
            if out[key] is not None:
                out[key] = out[key].isoformat()
        return out


def _stage(name):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(name, exc) from exc
            return False

    return _Ctx()


def _window_from(config, events_df, consumption_df):
    start, end = config.window_start, config.window_end
    dates = []
    if start is None or end is None:
        if len(events_df):
            ts = events_df["timestamp"]
            dates += [ts.min().date(), ts.max().date()]
        if consumption_df is not None and len(consumption_df):
            dates += [consumption_df["date"].min(), consumption_df["date"].max()]
        if not dates:
            raise InvalidInput("no data to infer a window from")
    return DateWindow(start or min(dates), end or max(dates))


def _code_events_frame(df: pd.DataFrame, window: DateWindow) -> CodedMatrix:
    """Columnar fast path equivalent to coding.code_events."""
    if len(df):
        dates = df["timestamp"].dt.date
        df = df[(dates >= window.start) & (dates <= window.end)]
    table = pd.crosstab(df["case_id"], df["code"]) if len(df) else pd.DataFrame()
    table = table.sort_index(axis=0).sort_index(axis=1)
    return CodedMatrix(
        table.to_numpy(dtype=np.float64) if len(df) else np.empty((0, 0)),
        case_ids=[str(c) for c in table.index],
        variable_names=[str(c) for c in table.columns],
        kind="event-frequency",
    )


def _code_consumption_frame(df: pd.DataFrame, window: DateWindow) -> CodedMatrix:
    """Columnar fast path equivalent to coding.code_consumption."""
    if len(df):
        df = df[(df["date"] >= window.start) & (df["date"] <= window.end)]
    if not len(df):
        return CodedMatrix(np.empty((0, 7)), [], list(WEEKDAY_NAMES),
                           kind="consumption-dayofweek")
    totals = df.iloc[:, 2:].sum(axis=1)
    weekday = pd.to_datetime(df["date"]).dt.weekday
    grouped = totals.groupby([df["case_id"], weekday]).mean().unstack()
    grouped = grouped.reindex(columns=range(7)).sort_index()
    values = grouped.to_numpy(dtype=np.float64)
    missing = np.isnan(values)
    if missing.any():
        row_mean = np.nanmean(values, axis=1)
        values = np.where(missing, row_mean[:, None], values)
    return CodedMatrix(values, [str(c) for c in grouped.index],
                       list(WEEKDAY_NAMES), kind="consumption-dayofweek")


def _ordinate_events(coded: CodedMatrix):
    return ordinate_ca(double_log_transform(coded))


def _distance_stage(ordination, rule):
    k = choose_k(ordination, rule)
    return ordinal_distances(ordination.F, k, case_ids=ordination.case_ids)


def _emit_partition_artifacts(out, tag, ordination, dv):
    io.write_scree_csv(scree(ordination), out / f"scree_{tag}.csv")
    io.write_coordinates_csv(ordination.case_ids, ordination.F, out / f"coords_F_{tag}.csv")
    io.write_coordinates_csv(ordination.variable_names, ordination.V,
                             out / f"coords_V_{tag}.csv", label_name="variable")
    io.write_distances_csv(dv, out / f"distances_{tag}.csv")
    io.write_distance_histogram_csv(dv.distances, out / f"distance_hist_{tag}.csv")


def _run_by_type(config, out):
    with _stage("S2"):
        events_df = io.load_events_frame(config.event_input)
        consumption_df = io.load_consumption_frame(config.consumption_input)
        window = _window_from(config, events_df, consumption_df)
        coded_events = _code_events_frame(events_df, window)
        coded_cons = _code_consumption_frame(consumption_df, window)
        ord_a = _ordinate_events(coded_events)
        ord_b = ordinate_pca(coded_cons)
    with _stage("S3"):
        dv_a = _distance_stage(ord_a, config.stopping_rule_events)
        dv_b = _distance_stage(ord_b, config.stopping_rule_consumption)
        _emit_partition_artifacts(out, "events", ord_a, dv_a)
        _emit_partition_artifacts(out, "consumption", ord_b, dv_b)
    with _stage("S4"):
        common, d_a, d_b = align_common_cases(dv_a, dv_b)
        ranks_a = rank_distances(d_a, case_ids=common)
        ranks_b = rank_distances(d_b, case_ids=common)
        jrd = joint_density(ranks_a.ranks, ranks_b.ranks,
                            grid_size=config.grid_size,
                            bandwidth=config.bandwidth, case_ids=common)
    return jrd


def _run_random(config, out):
    """Random vertical partitions of the event matrix, repeated R times.

    Per-case density, z, and ranks are averaged across repetitions and
    detection runs on the means (experimental aggregation).
    """
    if config.part_count != 2:
        raise ConfigError("random mode joint analysis supports part_count=2")
    with _stage("S2"):
        events_df = io.load_events_frame(config.event_input)
        window = _window_from(config, events_df, None)
        coded = _code_events_frame(events_df, window)
        if coded.shape[0] == 0:
            raise InvalidInput("no in-window events to analyze")

    acc = None
    for rep in range(config.repetitions):
        with _stage("S1"):
            spec = PartitionSpec(mode="random", part_count=2,
                                 seed=config.seed + rep, window=window)
            parts = random_partition(coded.variable_names, spec)
        dvs = []
        for names in parts:
            with _stage("S2"):
                idx = [coded.variable_names.index(n) for n in sorted(names)]
                sub = CodedMatrix(coded.matrix[:, idx], list(coded.case_ids),
                                  [coded.variable_names[i] for i in idx],
                                  kind="event-frequency")
                # Sub-partitions can have all-zero rows/columns; re-drop.
                keep_r = sub.matrix.sum(axis=1) > 0
                keep_c = sub.matrix.sum(axis=0) > 0
                sub = CodedMatrix(sub.matrix[np.ix_(keep_r, keep_c)],
                                  [c for c, k in zip(sub.case_ids, keep_r) if k],
                                  [v for v, k in zip(sub.variable_names, keep_c) if k],
                                  kind="event-frequency")
                ordn = _ordinate_events(sub)
            with _stage("S3"):
                dvs.append(_distance_stage(ordn, config.stopping_rule_events))
        with _stage("S4"):
            common, d_a, d_b = align_common_cases(dvs[0], dvs[1])
            ra = rank_distances(d_a, case_ids=common)
            rb = rank_distances(d_b, case_ids=common)
            jrd = joint_density(ra.ranks, rb.ranks, grid_size=config.grid_size,
                                bandwidth=config.bandwidth, case_ids=common)
        if acc is None:
            acc = {cid: np.zeros(5) for cid in common}
        for i, cid in enumerate(jrd.case_ids):
            acc.setdefault(cid, np.zeros(5))
            acc[cid] += [jrd.rank_a[i], jrd.rank_b[i], jrd.density[i], jrd.z_score[i], 1]

    ids = sorted(acc)
    agg = np.array([acc[c] for c in ids])
    reps = agg[:, 4:5]
    mean = agg[:, :4] / reps
    return JointRankDensity(
        case_ids=ids,
        rank_a=mean[:, 0], rank_b=mean[:, 1],
        density=mean[:, 2], z_score=mean[:, 3],
        grid=jrd.grid, bandwidth=jrd.bandwidth, grid_size=jrd.grid_size,
    )


def run_pipeline(config: PipelineConfig) -> AnomalyReport:
    """Execute S1-S5, write all artifacts, return the anomaly report."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if config.partition_mode == "by-type":
        jrd = _run_by_type(config, out)
    else:
        jrd = _run_random(config, out)

    with _stage("S5"):
        report = detect_anomalies(
            jrd,
            threshold=config.threshold,
            quadrant_filter=config.quadrant_filter,
            two_sided=config.two_sided,
            parameters=config.parameters(),
        )
        io.write_joint_cases_csv(jrd, out / "joint_cases.csv")
        io.write_density_grid_csv(jrd, out / "density_grid.csv")
        io.write_report_json(report, out / "report.json")
    return report
