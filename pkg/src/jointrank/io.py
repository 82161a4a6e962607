"""CSV/JSON ingestion and artifact emission.

Input formats:

* events:       ``case_id,timestamp,code`` (ISO-8601 timestamps, UTC)
* consumption:  ``case_id,date,b01..b48`` (non-negative kWh bins)

Parsers validate eagerly and report 1-based file line numbers (header is
line 1). ``parse_*_csv`` return record lists per the public contracts;
``load_*_frame`` return validated DataFrames and are the fast path used
by the pipeline at scale (their equivalence is covered by tests).

All writers use fixed numeric formats so artifacts are byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from .coding import CodedMatrix, ConsumptionRecord, EventRecord
from .errors import FormatError, InvalidValue, ParseError

EVENT_COLUMNS = ["case_id", "timestamp", "code"]
CONSUMPTION_COLUMNS = ["case_id", "date"] + [f"b{j:02d}" for j in range(1, 49)]

FLOAT_FMT = "%.12g"


def _read_csv(path, expected_columns):
    path = Path(path)
    if not path.exists():
        raise FormatError(f"file not found: {path}")
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise FormatError(f"{path} is empty (missing header)") from None
    if list(df.columns) != expected_columns:
        raise FormatError(
            f"expected columns {','.join(expected_columns)}, got {','.join(df.columns)}",
            line=1,
        )
    return df


def load_events_frame(path) -> pd.DataFrame:
    """Validated events table with parsed UTC timestamps."""
    df = _read_csv(path, EVENT_COLUMNS)
    if len(df) == 0:
        return df.assign(timestamp=pd.to_datetime(df["timestamp"], utc=True))
    for col in ("case_id", "code"):
        empty = df.index[df[col] == ""]
        if len(empty):
            raise FormatError(f"empty {col}", line=int(empty[0]) + 2)
    ts = pd.to_datetime(df["timestamp"], utc=True, format="ISO8601", errors="coerce")
    bad = df.index[ts.isna()]
    if len(bad):
        raise ParseError(f"bad timestamp {df['timestamp'][bad[0]]!r}", line=int(bad[0]) + 2)
    return df.assign(timestamp=ts)


def parse_events_csv(path):
    """List of EventRecord in file order."""
    df = load_events_frame(path)
    return [
        EventRecord(case_id=cid, timestamp=ts.to_pydatetime(), code=code)
        for cid, ts, code in zip(df["case_id"], df["timestamp"], df["code"])
    ]


def load_consumption_frame(path) -> pd.DataFrame:
    """Validated consumption table: parsed dates, float bins."""
    df = _read_csv(path, CONSUMPTION_COLUMNS)
    if len(df) == 0:
        return df
    empty = df.index[df["case_id"] == ""]
    if len(empty):
        raise FormatError("empty case_id", line=int(empty[0]) + 2)
    dates = pd.to_datetime(df["date"], format="%Y-%m-%d", errors="coerce")
    bad = df.index[dates.isna()]
    if len(bad):
        raise ParseError(f"bad date {df['date'][bad[0]]!r}", line=int(bad[0]) + 2)
    bin_cols = CONSUMPTION_COLUMNS[2:]
    bins = df[bin_cols].apply(pd.to_numeric, errors="coerce")
    bad = df.index[bins.isna().any(axis=1)]
    if len(bad):
        raise ParseError("unparseable bin value", line=int(bad[0]) + 2)
    neg = df.index[(bins.to_numpy() < 0).any(axis=1)]
    if len(neg):
        raise InvalidValue("negative bin value", line=int(neg[0]) + 2)
    out = bins.astype(np.float64)
    out.insert(0, "date", dates.dt.date)
    out.insert(0, "case_id", df["case_id"])
    return out


def parse_consumption_csv(path):
    """List of ConsumptionRecord in file order."""
    df = load_consumption_frame(path)
    bin_cols = CONSUMPTION_COLUMNS[2:]
    values = df[bin_cols].to_numpy() if len(df) else np.empty((0, 48))
    return [
        ConsumptionRecord(case_id=cid, date=d, bins=tuple(row))
        for cid, d, row in zip(df.get("case_id", []), df.get("date", []), values)
    ]


def parse_labels_csv(path) -> dict:
    """case_id -> int label from a generator labels file."""
    df = _read_csv(path, ["case_id", "label"])
    return dict(zip(df["case_id"], df["label"].astype(int)))


# --- artifact writers -----------------------------------------------------

def write_coded_matrix_csv(coded: CodedMatrix, path):
    df = pd.DataFrame(coded.matrix, columns=coded.variable_names)
    df.insert(0, "case_id", coded.case_ids)
    df.to_csv(path, index=False, float_format=FLOAT_FMT)


def read_coded_matrix_csv(path, kind="generic") -> CodedMatrix:
    df = pd.read_csv(path)
    if df.columns[0] != "case_id":
        raise FormatError("first column must be case_id", line=1)
    return CodedMatrix(
        df.iloc[:, 1:].to_numpy(dtype=np.float64),
        case_ids=df["case_id"].astype(str).tolist(),
        variable_names=[str(c) for c in df.columns[1:]],
        kind=kind,
    )


def write_scree_csv(triples, path):
    df = pd.DataFrame(triples, columns=["component", "eigenvalue", "cumulative_fraction"])
    df.to_csv(path, index=False, float_format=FLOAT_FMT)


def write_coordinates_csv(labels, coords, path, label_name="case_id"):
    df = pd.DataFrame(np.asarray(coords),
                      columns=[f"dim{j + 1}" for j in range(np.asarray(coords).shape[1])])
    df.insert(0, label_name, labels)
    df.to_csv(path, index=False, float_format=FLOAT_FMT)


def write_distances_csv(dv, path):
    df = pd.DataFrame({"case_id": dv.case_ids, "distance": dv.distances})
    df["k_used"] = dv.k_used
    df.to_csv(path, index=False, float_format=FLOAT_FMT)


def read_distances_csv(path):
    from .distance import DistanceVector

    df = pd.read_csv(path)
    for col in ("case_id", "distance", "k_used"):
        if col not in df.columns:
            raise FormatError(f"missing column {col}", line=1)
    return DistanceVector(
        case_ids=df["case_id"].astype(str).tolist(),
        distances=df["distance"].to_numpy(dtype=np.float64),
        k_used=int(df["k_used"].iloc[0]) if len(df) else 1,
    )


def write_distance_histogram_csv(distances, path, bins=50):
    counts, edges = np.histogram(np.asarray(distances), bins=bins)
    df = pd.DataFrame({
        "bin_left": edges[:-1],
        "bin_right": edges[1:],
        "count": counts,
    })
    df.to_csv(path, index=False, float_format=FLOAT_FMT)


def write_density_grid_csv(jrd, path):
    """G x G grid of z-scaled density, row = rank_a axis position."""
    np.savetxt(path, jrd.z_grid(), fmt=FLOAT_FMT, delimiter=",")


def write_joint_cases_csv(jrd, path):
    df = pd.DataFrame({
        "case_id": jrd.case_ids,
        "rank_a": jrd.rank_a,
        "rank_b": jrd.rank_b,
        "density": jrd.density,
        "z_score": jrd.z_score,
    })
    df.to_csv(path, index=False, float_format=FLOAT_FMT)


def read_joint_cases_csv(path):
    from .joint import JointRankDensity

    df = pd.read_csv(path)
    needed = {"case_id", "rank_a", "rank_b", "density", "z_score"}
    if not needed <= set(df.columns):
        raise FormatError("missing joint-density columns", line=1)
    m = len(df)
    return JointRankDensity(
        case_ids=df["case_id"].astype(str).tolist(),
        rank_a=df["rank_a"].to_numpy(dtype=np.float64),
        rank_b=df["rank_b"].to_numpy(dtype=np.float64),
        density=df["density"].to_numpy(dtype=np.float64),
        z_score=df["z_score"].to_numpy(dtype=np.float64),
        grid=np.zeros((16, 16)),
        bandwidth=m / 50.0 if m else 1.0,
        grid_size=16,
    )


def write_report_json(report, path):
    payload = {
        "parameters": report.parameters,
        "counts": {
            "total_cases": report.total_cases,
            "flagged": len(report.flagged),
        },
        "threshold": report.threshold,
        "flagged": [
            {"case_id": cid, "rank_a": ra, "rank_b": rb, "z": z}
            for cid, ra, rb, z in report.flagged
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
