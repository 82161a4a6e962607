"""Seeded synthetic smart-meter data with labeled planted anomalies.

Background cases draw event counts from a shared multinomial (Poisson
total per case) and daily consumption from a shared weekly profile with
multiplicative case-level and day-level noise. Anomalous cases draw from
a distinct event-code distribution AND a shifted weekly profile, so they
are extreme in both partitions; ``anomaly_mode`` can restrict the shift
to one partition to demonstrate non-detection.

All output is deterministic per seed, including CSV bytes.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import InvalidInput

# Relative weight of each weekday's consumption (Mon..Sun): weekday-heavy,
# like small business properties.
_BACKGROUND_WEEK = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 0.55, 0.5])
# Anomalies invert the weekly pattern and run hot.
_ANOMALY_WEEK = np.array([0.5, 0.5, 0.55, 0.5, 0.5, 2.2, 2.4])


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic dataset."""

    case_count: int = 1000
    event_code_count: int = 200
    anomaly_fraction: float = 0.02
    seed: int = 0
    event_rate: float = 40.0          # mean events per case (Poisson)
    code_concentration: float = 0.5   # Dirichlet alpha for the shared code mix
    daily_mean_kwh: float = 12.0
    case_sigma: float = 0.3           # lognormal sigma of the per-case scale
    day_noise: float = 0.1            # multiplicative day-to-day noise
    anomaly_scale: float = 3.0        # consumption multiplier for anomalies
    anomaly_rate_factor: float = 2.0  # event-rate multiplier for anomalies
    anomaly_code_count: int = 8       # codes the anomaly mechanism favors
    start_date: dt.date = dt.date(2024, 1, 1)
    days: int = 14
    anomaly_mode: str = "both"        # both | events | consumption

    def __post_init__(self):
        if self.case_count < 100:
            raise InvalidInput("case_count must be >= 100")
        if not 0 <= self.anomaly_fraction < 0.5:
            raise InvalidInput("anomaly_fraction must be in [0, 0.5)")
        if self.anomaly_mode not in ("both", "events", "consumption"):
            raise InvalidInput(f"unknown anomaly_mode {self.anomaly_mode!r}")

    @property
    def anomaly_count(self) -> int:
        return int(np.floor(self.anomaly_fraction * self.case_count))

    @property
    def end_date(self) -> dt.date:
        return self.start_date + dt.timedelta(days=self.days - 1)


def _case_ids(m):
    width = len(str(m - 1))
    return np.array([f"m{idx:0{width}d}" for idx in range(m)])


def generate_synthetic(spec: SyntheticSpec, out_dir):
    """Write events.csv, consumption.csv, labels.csv; return their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    m = spec.case_count
    p = spec.event_code_count
    ids = _case_ids(m)
    codes = np.array([f"E{j:03d}" for j in range(p)])

    labels = np.zeros(m, dtype=int)
    anom = rng.choice(m, size=spec.anomaly_count, replace=False)
    labels[anom] = 1
    is_anom = labels.astype(bool)

    # --- events -----------------------------------------------------------
    bg_probs = rng.dirichlet(np.full(p, spec.code_concentration))
    # Anomaly mechanism: most mass on the codes the background uses least.
    rare = np.argsort(bg_probs)[: spec.anomaly_code_count]
    an_probs = 0.2 * bg_probs.copy()
    an_probs[rare] += 0.8 * rng.dirichlet(np.full(spec.anomaly_code_count, 2.0))
    an_probs /= an_probs.sum()

    rates = np.full(m, spec.event_rate)
    if spec.anomaly_mode in ("both", "events"):
        rates[is_anom] *= spec.anomaly_rate_factor
    totals = np.maximum(rng.poisson(rates), 1)

    counts = np.empty((m, p), dtype=np.int64)
    counts[~is_anom] = rng.multinomial(totals[~is_anom], bg_probs)
    probs_for_anom = an_probs if spec.anomaly_mode in ("both", "events") else bg_probs
    if is_anom.any():
        counts[is_anom] = rng.multinomial(totals[is_anom], probs_for_anom)

    n_events = counts.sum()
    flat = counts.ravel()
    case_idx = np.repeat(np.arange(m * p) // p, flat)
    code_idx = np.repeat(np.arange(m * p) % p, flat)
    seconds = rng.integers(0, spec.days * 86400, size=n_events)
    epoch = dt.datetime(spec.start_date.year, spec.start_date.month, spec.start_date.day,
                        tzinfo=dt.timezone.utc)
    stamps = pd.to_datetime(int(epoch.timestamp()) + seconds, unit="s", utc=True)
    events = pd.DataFrame({
        "case_id": ids[case_idx],
        "timestamp": stamps.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "code": codes[code_idx],
    })

    # --- consumption ------------------------------------------------------
    dates = [spec.start_date + dt.timedelta(days=d) for d in range(spec.days)]
    weekdays = np.array([d.weekday() for d in dates])
    case_scale = spec.daily_mean_kwh * rng.lognormal(0.0, spec.case_sigma, m)
    week = np.tile(_BACKGROUND_WEEK, (m, 1))
    if spec.anomaly_mode in ("both", "consumption") and is_anom.any():
        week[is_anom] = _ANOMALY_WEEK
        case_scale[is_anom] *= spec.anomaly_scale

    # daily totals: (m, days)
    noise = rng.lognormal(0.0, spec.day_noise, (m, spec.days))
    daily = case_scale[:, None] * week[:, weekdays] * noise
    # Split each day into 48 bins with a fixed intra-day shape plus noise.
    shape = 1.0 + 0.5 * np.sin(np.linspace(0, 2 * np.pi, 48, endpoint=False))
    shape /= shape.sum()
    bin_noise = rng.uniform(0.9, 1.1, (m, spec.days, 48))
    bins = daily[:, :, None] * shape[None, None, :] * bin_noise

    cons = pd.DataFrame(
        np.round(bins.reshape(m * spec.days, 48), 4),
        columns=[f"b{j:02d}" for j in range(1, 49)],
    )
    cons.insert(0, "date", np.tile([d.isoformat() for d in dates], m))
    cons.insert(0, "case_id", np.repeat(ids, spec.days))

    labels_df = pd.DataFrame({"case_id": ids, "label": labels})

    events_path = out_dir / "events.csv"
    consumption_path = out_dir / "consumption.csv"
    labels_path = out_dir / "labels.csv"
    events.to_csv(events_path, index=False)
    cons.to_csv(consumption_path, index=False, float_format="%.4f")
    labels_df.to_csv(labels_path, index=False)
    return events_path, consumption_path, labels_path
