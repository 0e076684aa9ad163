"""Shared outdoor environment: diurnal/seasonal cycles plus AR(1) noise.

Temperature drives relative humidity through a decreasing affine link, which
reproduces the observed negative RH-temperature coupling.  RH is *not*
clipped here: out-of-range values (e.g. 100.4%) are left in so that
downstream cleaning has something to clip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

MINUTES_PER_DAY = 1440
MINUTES_PER_YEAR = 1440 * 365


@dataclass(frozen=True)
class EnvParams:
    t_mean: float = 30.3
    t_diurnal_amp: float = 4.0
    t_seasonal_amp: float = 3.0
    t_noise_std: float = 4.4710      # total T std -> 5.7
    rh_mean: float = 66.5
    rh_slope: float = -1.6           # dRH per degree above t_mean
    rh_noise_std: float = 9.5429     # total RH std -> 13.2
    ar_rho: float = 0.98             # per-minute AR(1) persistence
    wind_mean: float = 8.0
    wind_noise_std: float = 4.0
    rain_start_p: float = 0.002
    rain_stop_p: float = 0.05
    rain_mean_mm: float = 0.2

    # Diurnal phase: temperature peaks mid-afternoon (minute 900 of the day).
    diurnal_peak_minute: int = 900


def _ar1(rng, n, rho, std):
    if std == 0.0 or n == 0:
        return np.zeros(n)
    eps = rng.standard_normal(n) * (std * np.sqrt(1.0 - rho * rho))
    eps[0] = rng.standard_normal() * std  # stationary start
    return lfilter([1.0], [1.0, -rho], eps)


class EnvironmentModel:
    """Deterministic minute-resolution environment table for one seed."""

    def __init__(self, seed: int, n_minutes: int, params: EnvParams = EnvParams()):
        self.seed = seed
        self.params = params
        self.n_minutes = n_minutes
        p = params
        rng = np.random.default_rng(seed)
        minutes = np.arange(n_minutes)

        diurnal = p.t_diurnal_amp * np.cos(
            2 * np.pi * (minutes - p.diurnal_peak_minute) / MINUTES_PER_DAY)
        seasonal = p.t_seasonal_amp * np.sin(2 * np.pi * minutes / MINUTES_PER_YEAR)
        self.temp_c = p.t_mean + diurnal + seasonal + _ar1(rng, n_minutes, p.ar_rho,
                                                          p.t_noise_std)
        self.rh_pct = (p.rh_mean + p.rh_slope * (self.temp_c - p.t_mean)
                       + _ar1(rng, n_minutes, p.ar_rho, p.rh_noise_std))

        wind = p.wind_mean + _ar1(rng, n_minutes, p.ar_rho, p.wind_noise_std)
        self.wind_kmh = np.clip(wind, 0.0, None)
        self.wind_dir_deg = np.mod(
            rng.uniform(0, 360) + np.cumsum(rng.standard_normal(n_minutes) * 2.0), 360.0)

        # Two-state rain process: dry -> wet with rain_start_p, wet -> dry
        # with rain_stop_p; per-minute depth is exponential while wet.
        u = rng.random(n_minutes)
        wet = np.zeros(n_minutes, dtype=bool)
        state = False
        for i in range(n_minutes):
            state = (u[i] < p.rain_start_p) if not state else (u[i] >= p.rain_stop_p)
            wet[i] = state
        depth = rng.exponential(p.rain_mean_mm, n_minutes)
        self.rain_mm = np.where(wet, depth, 0.0)

    def at(self, minute: int):
        """(temp_c, rh_pct, wind_kmh, wind_dir_deg, rain_mm) at one minute."""
        i = min(max(minute, 0), self.n_minutes - 1)
        return (float(self.temp_c[i]), float(self.rh_pct[i]),
                float(self.wind_kmh[i]), float(self.wind_dir_deg[i]),
                float(self.rain_mm[i]))
