"""Coding of raw meter streams into cases-by-variables matrices.

Two codings are provided: event-code frequency counts over a time window,
and total daily consumption averaged by day of the week. Both return a
:class:`CodedMatrix` plus a :class:`DropReport` listing cases/variables
that were removed or imputed, so downstream ordination never sees an
all-zero row or column.
"""

from __future__ import annotations

import datetime as dt
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidPartition

WEEKDAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")


@dataclass(frozen=True)
class EventRecord:
    """One time-stamped nominal event code from one meter."""

    case_id: str
    timestamp: dt.datetime
    code: str

    def __post_init__(self):
        if not self.case_id:
            raise InvalidInput("EventRecord.case_id must be non-empty")
        if not self.code:
            raise InvalidInput("EventRecord.code must be non-empty")


@dataclass(frozen=True)
class ConsumptionRecord:
    """One day of consumption for one meter: 48 half-hour kWh bins."""

    case_id: str
    date: dt.date
    bins: tuple

    def __post_init__(self):
        if not self.case_id:
            raise InvalidInput("ConsumptionRecord.case_id must be non-empty")
        bins = tuple(float(b) for b in self.bins)
        if len(bins) != 48:
            raise InvalidInput(f"expected 48 bins, got {len(bins)}")
        arr = np.asarray(bins)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidInput("bins must be finite and non-negative")
        object.__setattr__(self, "bins", bins)

    @property
    def daily_total(self) -> float:
        return float(sum(self.bins))


@dataclass(frozen=True)
class DateWindow:
    """Inclusive calendar-date interval."""

    start: dt.date
    end: dt.date

    def __post_init__(self):
        if self.start > self.end:
            raise InvalidInput("window start is after window end")

    def contains(self, d: dt.date) -> bool:
        return self.start <= d <= self.end


@dataclass
class CodedMatrix:
    """Dense cases-by-variables matrix with row/column labels."""

    matrix: np.ndarray
    case_ids: list
    variable_names: list
    kind: str = "generic"

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (len(self.case_ids), len(self.variable_names)):
            raise InvalidInput("matrix shape does not match labels")

    @property
    def shape(self):
        return self.matrix.shape


@dataclass
class DropReport:
    """Identifiers removed or imputed during coding."""

    dropped_cases: list = field(default_factory=list)
    dropped_variables: list = field(default_factory=list)
    imputed_cases: list = field(default_factory=list)


@dataclass(frozen=True)
class PartitionSpec:
    """How to split the variable set: by data type, or at random."""

    mode: str = "by-type"
    part_count: int = 2
    seed: int = 0
    window: DateWindow | None = None

    def __post_init__(self):
        if self.mode not in ("by-type", "random"):
            raise InvalidPartition(f"unknown partition mode {self.mode!r}")
        if self.mode == "random" and self.part_count < 2:
            raise InvalidPartition("random partitioning needs part_count >= 2")


def _drop_zero_margins(matrix, case_ids, variable_names, report):
    row_keep = matrix.sum(axis=1) > 0
    col_keep = matrix.sum(axis=0) > 0
    report.dropped_cases.extend(c for c, k in zip(case_ids, row_keep) if not k)
    report.dropped_variables.extend(v for v, k in zip(variable_names, col_keep) if not k)
    matrix = matrix[np.ix_(row_keep, col_keep)]
    case_ids = [c for c, k in zip(case_ids, row_keep) if k]
    variable_names = [v for v, k in zip(variable_names, col_keep) if k]
    return matrix, case_ids, variable_names


def code_events(records, window: DateWindow):
    """Count each event code per case within the window.

    Rows are sorted case ids, columns sorted codes; all-zero rows and
    columns are dropped and reported.
    """
    counts = defaultdict(int)
    for rec in records:
        if window.contains(rec.timestamp.date()):
            counts[(rec.case_id, rec.code)] += 1

    case_ids = sorted({cid for cid, _ in counts})
    codes = sorted({code for _, code in counts})
    matrix = np.zeros((len(case_ids), len(codes)))
    row = {c: i for i, c in enumerate(case_ids)}
    col = {c: j for j, c in enumerate(codes)}
    for (cid, code), n in counts.items():
        matrix[row[cid], col[code]] = n

    report = DropReport()
    matrix, case_ids, codes = _drop_zero_margins(matrix, case_ids, codes, report)
    return CodedMatrix(matrix, case_ids, codes, kind="event-frequency"), report


def double_log_transform(coded: CodedMatrix) -> CodedMatrix:
    """Elementwise ln(ln(x + 1) + 1) + 1; maps 0 to exactly 1."""
    if np.any(coded.matrix < 0):
        raise InvalidInput("double log transform requires non-negative entries")
    out = np.log(np.log(coded.matrix + 1.0) + 1.0) + 1.0
    return CodedMatrix(out, list(coded.case_ids), list(coded.variable_names), kind=coded.kind)


def code_consumption(records, window: DateWindow):
    """Average total daily consumption by day of the week.

    One row per case, seven columns Mon..Sun. A weekday with no in-window
    observations is imputed with the case's mean over observed weekdays
    (and the case is flagged); cases with no in-window days are dropped.
    """
    # (case_id, weekday) -> [sum of daily totals, day count]
    sums = defaultdict(float)
    days = defaultdict(int)
    for rec in records:
        if window.contains(rec.date):
            key = (rec.case_id, rec.date.weekday())
            sums[key] += rec.daily_total
            days[key] += 1

    case_ids = sorted({cid for cid, _ in days})
    report = DropReport()
    all_ids = sorted({rec.case_id for rec in records})
    report.dropped_cases.extend(c for c in all_ids if c not in set(case_ids))

    matrix = np.empty((len(case_ids), 7))
    for i, cid in enumerate(case_ids):
        means = np.full(7, np.nan)
        for wd in range(7):
            if days[(cid, wd)]:
                means[wd] = sums[(cid, wd)] / days[(cid, wd)]
        missing = np.isnan(means)
        if missing.any():
            means[missing] = means[~missing].mean()
            report.imputed_cases.append(cid)
        matrix[i] = means

    coded = CodedMatrix(matrix, case_ids, list(WEEKDAY_NAMES), kind="consumption-dayofweek")
    return coded, report


def random_partition(variables, spec: PartitionSpec):
    """Split variable names into balanced random subsets (deterministic per seed)."""
    if spec.mode != "random":
        raise InvalidPartition("random_partition requires mode='random'")
    variables = list(variables)
    if spec.part_count > len(variables):
        raise InvalidPartition(
            f"cannot split {len(variables)} variables into {spec.part_count} parts"
        )
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(len(variables))
    # First (len % parts) subsets get the extra variable.
    sizes = np.full(spec.part_count, len(variables) // spec.part_count)
    sizes[: len(variables) % spec.part_count] += 1
    subsets = []
    pos = 0
    for size in sizes:
        subsets.append([variables[i] for i in order[pos : pos + size]])
        pos += size
    return subsets


def random_numeric_coding(codes, seed):
    """Seeded injective map from nominal levels to uniform values in [0, 1]."""
    codes = list(codes)
    if len(set(codes)) != len(codes):
        raise InvalidInput("duplicate nominal levels")
    rng = np.random.default_rng(seed)
    values = rng.random(len(codes))
    # Uniform draws collide with probability 0, but guarantee injectivity.
    while len(set(values.tolist())) != len(values):  # pragma: no cover
        values = rng.random(len(codes))
    return dict(zip(codes, values.tolist()))
