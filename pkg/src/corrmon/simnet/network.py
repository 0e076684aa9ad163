"""Deterministic simulation of the synchronized LoRa monitoring network.

Time base is integer milliseconds of true time.  The GPS-disciplined
reference clock is modeled as true time quantized to whole seconds (it is
re-disciplined every second, so it never accumulates drift).  The gateway
RTC snaps to the reference every 10 minutes; every station snaps to the
gateway once per minute; stations sample on their own clock's minute marks,
log locally, and uplink batches of 10 records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from numba import njit

from ..ml.models import derive_seed
from ..schema import GATEWAY_CSV_COLUMNS, WIND_SECTORS
from .config import NetworkConfig, default_config
from .environment import EnvironmentModel, EnvParams

MS_PER_MINUTE = 60_000
QUANT_MS = 1000


@njit(cache=True)
def _drift_ms(delta_ms, ppb):
    # Elapsed local time for elapsed true time delta_ms at a clock running
    # (1 + ppb/1e9) fast; rounded to nearest ms.
    return delta_ms + (delta_ms * ppb + 500_000_000) // 1_000_000_000


@njit(cache=True)
def _station_clock_loop(n_marks, st_ppb, gw_ppb, gw_sync_minutes,
                        sample_true_ms, offset_ms):
    """Fill per-mark sample times (true ms) and station-gateway offsets."""
    next_mark = 0  # station-local ms value of the next minute mark
    k = 0
    m = 0
    while k < n_marks:
        t = m * MS_PER_MINUTE
        gs = (m - (m % gw_sync_minutes)) * MS_PER_MINUTE  # gateway snap = true
        gw_at_t = gs + _drift_ms(t - gs, gw_ppb)
        s0 = (gw_at_t // QUANT_MS) * QUANT_MS  # station snaps, 1 s quantized

        # Marks the snap itself just reached or passed.
        while next_mark <= s0 and k < n_marks:
            sample_true_ms[k] = t
            offset_ms[k] = s0 - gw_at_t
            k += 1
            next_mark += MS_PER_MINUTE

        # Marks crossed while free-running until the next sync.
        end_local = s0 + _drift_ms(MS_PER_MINUTE, st_ppb)
        while next_mark <= end_local and k < n_marks:
            target = next_mark - s0
            delta = (target * 1_000_000_000) // (1_000_000_000 + st_ppb)
            while _drift_ms(delta, st_ppb) < target:
                delta += 1
            while delta > 0 and _drift_ms(delta - 1, st_ppb) >= target:
                delta -= 1
            ts = t + delta
            st_at_ts = s0 + _drift_ms(delta, st_ppb)
            gw_at_ts = gs + _drift_ms(ts - gs, gw_ppb)
            sample_true_ms[k] = ts
            offset_ms[k] = st_at_ts - gw_at_ts
            k += 1
            next_mark += MS_PER_MINUTE
        m += 1


@dataclass
class StationLog:
    """Per-station SD-card log plus clock diagnostics."""
    station: object
    minutes: np.ndarray          # station-clock minute index per record
    sample_true_ms: np.ndarray
    offset_ms: np.ndarray        # station minus gateway clock at sample time
    temp_c: np.ndarray
    rh_pct: np.ndarray
    wind_kmh: np.ndarray | None
    wind_dir: list | None
    rain_mm: np.ndarray | None

    @property
    def max_abs_offset_ms(self) -> int:
        if len(self.offset_ms) == 0:
            return 0
        return int(np.max(np.abs(self.offset_ms)))


@dataclass
class SimulationResult:
    config: NetworkConfig
    seed: int
    n_minutes: int
    station_logs: dict
    delivered: dict              # station id -> boolean mask over records
    gateway_frame: pd.DataFrame = field(default=None)

    @property
    def max_abs_offset_ms(self) -> int:
        return max(log.max_abs_offset_ms for log in self.station_logs.values())

    @property
    def gateway_record_count(self) -> int:
        return int(sum(mask.sum() for mask in self.delivered.values()))


def transmit(batch_index: int, loss_p: float, uniforms: np.ndarray) -> bool:
    """Whether one uplink batch is delivered; draw comes from a dedicated
    pre-generated per-station stream so outcomes are seed-deterministic."""
    if loss_p <= 0.0:
        return True
    if loss_p >= 1.0:
        return False
    return bool(uniforms[batch_index] >= loss_p)


def clock_offset_bound_ms(station_ppm: float, gateway_ppm: float,
                          sync_seconds: int) -> float:
    return (abs(station_ppm) + abs(gateway_ppm)) * 1e-6 * sync_seconds * 1000 + QUANT_MS


class SensorNetworkSim:
    """One deterministic run of the whole network."""

    def __init__(self, config: NetworkConfig | None = None, seed: int = 0,
                 env_params: EnvParams = EnvParams()):
        self.config = config or default_config()
        self.seed = seed
        self.env_params = env_params

    def run(self, days: float | None = None, minutes: int | None = None,
            check_clock_bound: bool = True) -> SimulationResult:
        if minutes is None:
            minutes = int(round(days * 1440))
        cfg = self.config
        env = EnvironmentModel(self.seed, minutes + 2, self.env_params)

        station_logs = {}
        delivered = {}
        for s_idx, st in enumerate(cfg.stations):
            n = minutes
            sample_true = np.empty(n, dtype=np.int64)
            offsets = np.empty(n, dtype=np.int64)
            _station_clock_loop(n, int(round(st.drift_ppm * 1000)),
                                int(round(cfg.gateway_drift_ppm * 1000)),
                                cfg.gateway_sync_minutes, sample_true, offsets)
            if check_clock_bound and n > 0:
                bound = clock_offset_bound_ms(st.drift_ppm, cfg.gateway_drift_ppm,
                                              cfg.station_sync_seconds)
                worst = int(np.max(np.abs(offsets)))
                assert worst <= bound, (
                    f"clock invariant violated for {st.id}: {worst} > {bound}")

            # Sensor readings: environment at the sampled minute plus the
            # station's microclimate bias and sensor noise.
            env_idx = np.clip(np.round(sample_true / MS_PER_MINUTE).astype(np.int64),
                              0, env.n_minutes - 1)
            rng = np.random.default_rng(derive_seed(self.seed, s_idx))
            temp = env.temp_c[env_idx] + st.dt_c + 0.15 * rng.standard_normal(n)
            rh = env.rh_pct[env_idx] + st.drh_pct + 0.8 * rng.standard_normal(n)
            wind = wind_dir = rain = None
            if st.measures_wind:
                wind = np.clip(env.wind_kmh[env_idx] + 0.5 * rng.standard_normal(n),
                               0.0, None)
            if st.measures_rain:
                sector = (env.wind_dir_deg[env_idx] / 22.5 + 0.5).astype(int) % 16
                wind_dir = [WIND_SECTORS[i] for i in sector]
                rain = env.rain_mm[env_idx]

            station_logs[st.id] = StationLog(
                station=st, minutes=np.arange(n), sample_true_ms=sample_true,
                offset_ms=offsets, temp_c=temp, rh_pct=rh, wind_kmh=wind,
                wind_dir=wind_dir, rain_mm=rain)

            # Uplink: batches of uplink_minutes records; a lost batch leaves
            # a gap at the gateway (the SD log keeps everything).
            n_batches = (n + cfg.uplink_minutes - 1) // cfg.uplink_minutes
            tx_rng = np.random.default_rng(derive_seed(self.seed ^ 0x7A_11CE, s_idx))
            uniforms = tx_rng.random(n_batches)
            mask = np.ones(n, dtype=bool)
            if not cfg.retransmit and cfg.loss_p > 0.0:
                for b in range(n_batches):
                    if not transmit(b, cfg.loss_p, uniforms):
                        mask[b * cfg.uplink_minutes:(b + 1) * cfg.uplink_minutes] = False
            delivered[st.id] = mask

        result = SimulationResult(config=cfg, seed=self.seed, n_minutes=minutes,
                                  station_logs=station_logs, delivered=delivered)
        result.gateway_frame = consolidate(result)
        return result


def _fmt(values, decimals):
    return np.char.mod(f"%.{decimals}f", values)


def consolidate(result: SimulationResult) -> pd.DataFrame:
    """Gateway store: delivered records, sorted by (timestamp, station_id)."""
    start = pd.Timestamp(result.config.start)
    stamp_pool = (start + pd.to_timedelta(np.arange(result.n_minutes), unit="min")
                  ).strftime("%Y-%m-%dT%H:%M").to_numpy()
    parts = []
    for sid, log in result.station_logs.items():
        mask = result.delivered[sid]
        n = int(mask.sum())
        part = pd.DataFrame({
            "timestamp": stamp_pool[log.minutes[mask]],
            "station_id": np.full(n, sid),
            "temp_c": _fmt(log.temp_c[mask], 2),
            "rh_pct": _fmt(log.rh_pct[mask], 2),
            "wind_kmh": _fmt(log.wind_kmh[mask], 1) if log.wind_kmh is not None else "",
            "wind_dir": (np.asarray(log.wind_dir, dtype=object)[mask]
                         if log.wind_dir is not None else ""),
            "rain_mm": _fmt(log.rain_mm[mask], 2) if log.rain_mm is not None else "",
        })
        parts.append(part)
    frame = pd.concat(parts, ignore_index=True)
    frame = frame.sort_values(["timestamp", "station_id"], kind="stable",
                              ignore_index=True)
    return frame[GATEWAY_CSV_COLUMNS]


def write_corpus(result: SimulationResult, path: str) -> None:
    result.gateway_frame.to_csv(path, index=False, lineterminator="\n")
