"""Live monitoring engine.

One tick is one simulated minute.  Each tick the engine advances the
environment, refreshes the trailing 24-hour feature window, predicts the
corrosion rate with the selected model (or directly via the physics formula
when no model is loaded), classifies risk, and emits an operator
recommendation.

Injected events push temperature or humidity off baseline.  While any
mitigation is active the engine holds the environment (no new stochastic
shocks, diurnal phase paused) and the mitigated driver's excursion decays
geometrically toward baseline, so healing is monotone and deterministic.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass

import numpy as np

from datetime import datetime, timedelta

from ..physics import DEFAULT_ALARM_THRESHOLD, ModelParams, classify_risk, corrosion_rate
from ..schema import FEATURE_COLUMNS, TIMESTAMP_FORMAT
from ..simnet.environment import MINUTES_PER_DAY, MINUTES_PER_YEAR, EnvParams

START_TIMESTAMP = datetime(2021, 1, 1)
WINDOW_MINUTES = 1440
WET_RH_FRAC = 0.8
HISTORY_CAPACITY = 3600
INSPECTION_PERSISTENCE_TICKS = 30

EVENT_KINDS = {
    # kind -> (driver, default magnitude)
    "humidity_surge": ("rh", 25.0),
    "heat_wave": ("temp", 8.0),
    "cold_snap": ("temp", -8.0),
    "rain_ingress": ("rh", 15.0),
}

MITIGATION_KINDS = {
    # kind -> driver whose excursion it removes
    "dehumidify": "rh",
    "ventilate": "temp",
    "coat": "rate",
}

MODEL_PREFERENCE = ("gbm2", "gbm", "forest", "linear")


class UnknownEventError(ValueError):
    pass


class UnknownMitigationError(ValueError):
    pass


@dataclass
class Mitigation:
    kind: str
    strength: float
    since_tick: int

    def __post_init__(self):
        if self.kind not in MITIGATION_KINDS:
            raise UnknownMitigationError(f"unknown mitigation {self.kind!r}")
        if not (0.0 < self.strength <= 1.0):
            raise ValueError(f"strength must be in (0, 1], got {self.strength}")


def _revert(excess: float, magnitude: float) -> float:
    """Undo an event's push without crossing zero on an already-mitigated
    excursion."""
    if magnitude >= 0:
        return excess - min(magnitude, max(excess, 0.0))
    return excess - max(magnitude, min(excess, 0.0))


class MonitorEngine:
    """Deterministic (per seed) tick-driven corrosion monitor."""

    def __init__(self, params: ModelParams, models: dict | None = None,
                 seed: int = 0, alarm_threshold: float = DEFAULT_ALARM_THRESHOLD,
                 env_params: EnvParams = EnvParams()):
        self.params = params
        self.models = dict(models or {})
        self.alarm_threshold = alarm_threshold
        self.env = env_params
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        self._lock = threading.RLock()

        self.active_family = next(
            (f for f in MODEL_PREFERENCE if f in self.models), None)

        self.tick_count = 0
        self._phase = -1             # environment minute; pauses while mitigated
        self._temp_noise = 0.0
        self._rh_noise = 0.0
        self._temp_excess = 0.0      # event-driven excursions
        self._rh_excess = 0.0
        self.mitigations: dict[str, Mitigation] = {}
        self.events: list[dict] = []
        self._active_events: list[dict] = []
        self.model_metrics: dict = {}
        self.history: deque = deque(maxlen=HISTORY_CAPACITY)
        self._rh_window: deque = deque(maxlen=WINDOW_MINUTES)
        self._tk_window: deque = deque(maxlen=WINDOW_MINUTES)
        self._elevated_ticks = 0
        self.state: dict | None = None
        # Start the noise states in-distribution, then produce a first state.
        self._temp_noise = float(self._rng.standard_normal()) * self.env.t_noise_std
        self._rh_noise = float(self._rng.standard_normal()) * self.env.rh_noise_std
        self.tick()

    # -- commands ---------------------------------------------------------

    def inject_event(self, kind: str, magnitude: float | None = None,
                     duration: int | None = None) -> dict:
        if kind not in EVENT_KINDS:
            raise UnknownEventError(f"unknown event {kind!r}")
        if duration is not None and duration <= 0:
            raise ValueError(f"duration must be positive, got {duration}")
        driver, default_mag = EVENT_KINDS[kind]
        mag = default_mag if magnitude is None else float(magnitude)
        with self._lock:
            if driver == "rh":
                self._rh_excess += mag
            else:
                self._temp_excess += mag
            record = {"tick": self.tick_count, "kind": kind, "driver": driver,
                      "magnitude": mag, "duration": duration,
                      "expires_at": (None if duration is None
                                     else self.tick_count + duration)}
            self.events.append(record)
            self._active_events.append(record)
            return record

    def _expire_events(self):
        remaining = []
        for ev in self._active_events:
            if ev["expires_at"] is not None and self.tick_count >= ev["expires_at"]:
                # A finite event reverts its push when it lapses, capped so a
                # mitigation that already removed the excursion stays removed.
                if ev["driver"] == "rh":
                    self._rh_excess = _revert(self._rh_excess, ev["magnitude"])
                else:
                    self._temp_excess = _revert(self._temp_excess, ev["magnitude"])
            else:
                remaining.append(ev)
        self._active_events = remaining

    def activate_mitigation(self, kind: str, strength: float = 0.2) -> Mitigation:
        with self._lock:
            mit = Mitigation(kind=kind, strength=strength,
                             since_tick=self.tick_count)
            # Fold the stochastic state into a removable excursion.  The
            # equipment only extracts (moisture, heat), so a deficit is
            # treated as already at baseline.
            if kind == "dehumidify":
                self._rh_excess = max(self._rh_noise + self._rh_excess, 0.0)
                self._rh_noise = 0.0
            elif kind == "ventilate":
                self._temp_excess = max(self._temp_noise + self._temp_excess, 0.0)
                self._temp_noise = 0.0
            self.mitigations[kind] = mit
            return mit

    def deactivate_mitigation(self, kind: str) -> bool:
        with self._lock:
            return self.mitigations.pop(kind, None) is not None

    def select_model(self, family: str) -> None:
        with self._lock:
            if family not in self.models:
                raise KeyError(f"no loaded model for family {family!r}")
            self.active_family = family

    # -- environment ------------------------------------------------------

    def _base_curves(self, minute):
        p = self.env
        diurnal = p.t_diurnal_amp * math.cos(
            2 * math.pi * (minute - p.diurnal_peak_minute) / MINUTES_PER_DAY)
        seasonal = p.t_seasonal_amp * math.sin(2 * math.pi * minute / MINUTES_PER_YEAR)
        return p.t_mean + diurnal + seasonal

    def _advance_environment(self):
        p = self.env
        if self.mitigations:
            # Controlled hold: no new shocks, phase paused, excursions of the
            # mitigated drivers decay geometrically.
            if "dehumidify" in self.mitigations:
                self._rh_excess *= 1.0 - self.mitigations["dehumidify"].strength
            if "ventilate" in self.mitigations:
                self._temp_excess *= 1.0 - self.mitigations["ventilate"].strength
        else:
            self._phase += 1
            rho = p.ar_rho
            shock = math.sqrt(1.0 - rho * rho)
            self._temp_noise = (rho * self._temp_noise
                                + float(self._rng.standard_normal())
                                * p.t_noise_std * shock)
            self._rh_noise = (rho * self._rh_noise
                              + float(self._rng.standard_normal())
                              * p.rh_noise_std * shock)

        t_base = self._base_curves(max(self._phase, 0))
        temp_c = t_base + self._temp_noise + self._temp_excess
        rh_pct = (p.rh_mean + p.rh_slope * (t_base + self._temp_noise - p.t_mean)
                  + self._rh_noise + self._rh_excess)
        return temp_c, min(max(rh_pct, 0.0), 100.0)

    def baseline_rate(self) -> float:
        """Rate at current conditions with the humidity excursion removed."""
        with self._lock:
            p = self.env
            t_base = self._base_curves(max(self._phase, 0))
            temp_c = t_base + self._temp_noise + self._temp_excess
            rh_pct = p.rh_mean + p.rh_slope * (t_base + self._temp_noise - p.t_mean)
            rh_pct = min(max(rh_pct, 0.0), 100.0)
            rate = corrosion_rate(self.params, temp_c, rh_pct / 100.0)
            return rate * self._coat_factor()

    def _coat_factor(self) -> float:
        mit = self.mitigations.get("coat")
        return 1.0 - mit.strength if mit else 1.0

    # -- features / decisions ---------------------------------------------

    def _features(self, temp_c, rh_pct):
        rh_frac = rh_pct / 100.0
        temp_k = temp_c + 273.15
        self._rh_window.append(rh_frac)
        self._tk_window.append(temp_k)
        rh = np.fromiter(self._rh_window, dtype=float)
        tk = np.fromiter(self._tk_window, dtype=float)
        values = {
            "temp_c": temp_c, "rh_pct": rh_pct, "temp_k": temp_k,
            "rh_frac": rh_frac,
            "roll24_rh_mean": float(rh.mean()),
            "roll24_rh_std": float(rh.std()),
            "roll24_tk_mean": float(tk.mean()),
            "hours_wet_24h": float((rh > WET_RH_FRAC).sum()) / 60.0,
            "station_code": 0.0,
        }
        return np.array([[values[c] for c in FEATURE_COLUMNS]])

    def _recommend(self, alarm, risk_label, temp_c, rh_pct):
        if risk_label in ("C3", "C4", "C5", "CX"):
            self._elevated_ticks += 1
        else:
            self._elevated_ticks = 0
        if alarm and rh_pct >= self.env.rh_mean:
            return "activate_dehumidifiers"
        if alarm and temp_c >= self.env.t_mean:
            return "increase_ventilation"
        if self._elevated_ticks >= INSPECTION_PERSISTENCE_TICKS:
            return "schedule_inspection"
        return "nominal"

    def tick(self) -> dict:
        with self._lock:
            self._expire_events()
            temp_c, rh_pct = self._advance_environment()
            features = self._features(temp_c, rh_pct)

            physics_rate = corrosion_rate(self.params, temp_c, rh_pct / 100.0)
            if self.active_family is not None:
                predicted = float(self.models[self.active_family].predict(features)[0])
                predicted = max(predicted, 0.0)
            else:
                predicted = physics_rate  # contingency: Eq-style physics directly

            coat = self._coat_factor()
            predicted *= coat
            physics_rate *= coat

            risk = classify_risk(predicted, self.alarm_threshold)
            recommendation = self._recommend(risk.alarm, risk.label, temp_c, rh_pct)
            self.tick_count += 1
            self.state = {
                "tick": self.tick_count,
                "timestamp": (START_TIMESTAMP
                              + timedelta(minutes=self.tick_count)
                              ).strftime(TIMESTAMP_FORMAT),
                "active_event": (self._active_events[-1]["kind"]
                                 if self._active_events else None),
                "temp_c": round(temp_c, 4),
                "rh_pct": round(rh_pct, 4),
                "predicted_rate": predicted,
                "physics_rate": physics_rate,
                "risk_class": risk.label,
                "alarm": risk.alarm,
                "model_family": self.active_family or "contingency",
                "recommendation": recommendation,
                "mitigations": sorted(self.mitigations),
            }
            self.history.append(self.state)
            return self.state

    def recent_history(self, n: int = 100) -> list:
        with self._lock:
            if n <= 0:
                return []
            return list(self.history)[-n:]
