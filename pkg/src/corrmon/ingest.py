"""Gateway-corpus parsing and preprocessing.

Pipeline: parse (drop unparseable timestamps), clean (RH clipping, per-station
forward/backward fill, unit conversion), physics target, trailing 24-hour
rolling features, and monthly aggregates for reporting.  Every dropped row is
counted so the run report balances exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .physics import ModelParams, corrosion_rate
from .schema import FEATURE_CSV_COLUMNS, GATEWAY_CSV_COLUMNS, TIMESTAMP_FORMAT

WINDOW_MINUTES = 1440
MIN_COVERAGE = 0.8
WET_RH_FRAC = 0.8


class CorpusSchemaError(ValueError):
    """Input file header does not match the gateway CSV schema."""


@dataclass
class RowAccounting:
    rows_read: int = 0
    parse_skipped: int = 0
    duplicate_rows: int = 0
    station_field_dropped: int = 0
    dropped_low_coverage: int = 0
    feature_rows: int = 0
    extra: dict = field(default_factory=dict)

    def check_conservation(self):
        assert self.rows_read == (self.parse_skipped + self.duplicate_rows
                                  + self.station_field_dropped
                                  + self.dropped_low_coverage + self.feature_rows), \
            f"row accounting does not balance: {self}"

    def to_dict(self):
        return {k: v for k, v in vars(self).items() if k != "extra"} | self.extra


def parse_corpus(path: str, accounting: RowAccounting | None = None) -> pd.DataFrame:
    """Read a gateway CSV; rows with unparseable timestamps are skipped and
    counted, everything else keeps its source order."""
    acc = accounting if accounting is not None else RowAccounting()
    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    if list(df.columns) != GATEWAY_CSV_COLUMNS:
        raise CorpusSchemaError(
            f"header mismatch in {path}: {list(df.columns)}")
    acc.rows_read = len(df)
    stamps = pd.to_datetime(df["timestamp"], errors="coerce").dt.floor("min")
    keep = stamps.notna()
    acc.parse_skipped = int((~keep).sum())
    df = df.loc[keep].copy()
    df["timestamp"] = stamps[keep]
    for col in ("temp_c", "rh_pct", "wind_kmh", "rain_mm"):
        df[col] = pd.to_numeric(df[col], errors="coerce")
    dupes = df.duplicated(["timestamp", "station_id"])
    acc.duplicate_rows = int(dupes.sum())
    return df.loc[~dupes].reset_index(drop=True)


def clean(df: pd.DataFrame, accounting: RowAccounting | None = None) -> pd.DataFrame:
    """Clip RH to [0,100], fill gaps forward-then-backward per station, and
    derive Kelvin / fractional-humidity columns."""
    acc = accounting if accounting is not None else RowAccounting()
    df = df.copy()
    df["rh_pct"] = df["rh_pct"].clip(0.0, 100.0)
    df = df.sort_values(["station_id", "timestamp"], kind="stable")
    for col in ("temp_c", "rh_pct"):
        grouped = df.groupby("station_id", sort=False)[col]
        df[col] = grouped.ffill()
        df[col] = df.groupby("station_id", sort=False)[col].bfill()
    # A station with no valid value at all for a field cannot be filled.
    bad = df["temp_c"].isna() | df["rh_pct"].isna()
    acc.station_field_dropped += int(bad.sum())
    df = df.loc[~bad].copy()
    df["temp_k"] = df["temp_c"] + 273.15
    df["rh_frac"] = df["rh_pct"] / 100.0
    return df.reset_index(drop=True)


def compute_target(df: pd.DataFrame, params: ModelParams) -> pd.DataFrame:
    df = df.copy()
    df["target_cr_um_yr"] = corrosion_rate(params, df["temp_c"].to_numpy(),
                                           df["rh_frac"].to_numpy())
    return df


def rolling_features(df: pd.DataFrame, window: int = WINDOW_MINUTES,
                     min_coverage: float = MIN_COVERAGE,
                     accounting: RowAccounting | None = None) -> pd.DataFrame:
    """Trailing-window features per station on the minute grid.

    The window covers the `window` minutes ending at (and including) each
    observed minute; rows whose window holds fewer than `min_coverage` of its
    minutes are dropped and counted.  Only trailing data enters any feature.
    """
    acc = accounting if accounting is not None else RowAccounting()
    station_ids = sorted(df["station_id"].unique())
    code_of = {sid: i for i, sid in enumerate(station_ids)}
    min_count = int(np.ceil(min_coverage * window))

    parts = []
    for sid in station_ids:
        g = df[df["station_id"] == sid].set_index("timestamp").sort_index()
        grid = pd.date_range(g.index.min(), g.index.max(), freq="min")
        on_grid = g.reindex(grid)
        observed = on_grid["rh_frac"].notna()

        count = observed.rolling(window, min_periods=1).sum()
        rh_mean = on_grid["rh_frac"].rolling(window, min_periods=1).mean()
        rh_std = on_grid["rh_frac"].rolling(window, min_periods=1).std(ddof=0)
        tk_mean = on_grid["temp_k"].rolling(window, min_periods=1).mean()
        wet = (on_grid["rh_frac"] > WET_RH_FRAC).rolling(window, min_periods=1).sum()

        out = on_grid.loc[observed, ["station_id", "temp_c", "rh_pct", "temp_k",
                                     "rh_frac", "target_cr_um_yr"]].copy()
        out["roll24_rh_mean"] = rh_mean[observed]
        out["roll24_rh_std"] = rh_std[observed]
        out["roll24_tk_mean"] = tk_mean[observed]
        out["hours_wet_24h"] = wet[observed] / 60.0
        out["station_code"] = code_of[sid]
        covered = count[observed] >= min_count
        acc.dropped_low_coverage += int((~covered).sum())
        parts.append(out.loc[covered])

    result = pd.concat(parts) if parts else pd.DataFrame(
        columns=FEATURE_CSV_COLUMNS).set_index(pd.DatetimeIndex([], name="timestamp"))
    result = result.rename_axis("timestamp").reset_index()
    result = result.sort_values(["station_id", "timestamp"], kind="stable",
                                ignore_index=True)
    acc.feature_rows = len(result)
    return result[FEATURE_CSV_COLUMNS]


def monthly_summary(df: pd.DataFrame) -> pd.DataFrame:
    """Per-calendar-month mean and population std of rate, RH and temperature."""
    if df.empty:
        raise ValueError("monthly summary needs a non-empty dataset")
    month = df["timestamp"].dt.strftime("%Y-%m")
    def pstd(x):
        return x.std(ddof=0)
    agg = df.groupby(month).agg(
        cr_mean=("target_cr_um_yr", "mean"), cr_std=("target_cr_um_yr", pstd),
        rh_mean=("rh_pct", "mean"), rh_std=("rh_pct", pstd),
        temp_mean=("temp_c", "mean"), temp_std=("temp_c", pstd),
        n_rows=("rh_pct", "size"))
    agg = agg[agg["n_rows"] > 0]
    return agg.rename_axis("month").reset_index()


def preprocess(corpus_path: str, params: ModelParams, features_path: str,
               report_path: str | None = None,
               monthly_path: str | None = None) -> RowAccounting:
    """Full pipeline from gateway CSV to feature file, with row accounting."""
    acc = RowAccounting()
    raw = parse_corpus(corpus_path, acc)
    cleaned = clean(raw, acc)
    targeted = compute_target(cleaned, params)
    features = rolling_features(targeted, accounting=acc)
    acc.check_conservation()

    out = features.copy()
    out["timestamp"] = out["timestamp"].dt.strftime(TIMESTAMP_FORMAT)
    out.to_csv(features_path, index=False, lineterminator="\n")
    if monthly_path is not None:
        monthly_summary(targeted).to_csv(monthly_path, index=False,
                                         lineterminator="\n")
    if report_path is not None:
        with open(report_path, "w") as fh:
            json.dump(acc.to_dict(), fh, indent=2)
    return acc
