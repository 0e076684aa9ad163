"""Request/response models for the monitoring HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class StateOut(BaseModel):
    tick: int
    timestamp: str
    active_event: str | None
    temp_c: float
    rh_pct: float
    predicted_rate: float
    physics_rate: float
    risk_class: str
    alarm: bool
    model_family: str
    recommendation: str
    mitigations: list[str]


class HistoryOut(BaseModel):
    states: list[StateOut]


class ModelsOut(BaseModel):
    families: list[str]
    active: str
    metrics: dict[str, dict] = {}


class SelectModelIn(BaseModel):
    family: str


class EventIn(BaseModel):
    kind: str
    magnitude: float | None = None
    duration: int | None = Field(default=None, gt=0)


class EventOut(BaseModel):
    tick: int
    kind: str
    driver: str
    magnitude: float
    duration: int | None
    expires_at: int | None


class MitigationIn(BaseModel):
    kind: str
    strength: float = Field(default=0.2, gt=0.0, le=1.0)


class MitigationOut(BaseModel):
    kind: str
    strength: float
    since_tick: int
    active: bool


class PredictIn(BaseModel):
    temp_c: float
    rh_pct: float = Field(ge=0.0, le=100.0)
    roll24_rh_mean: float | None = None
    roll24_rh_std: float = 0.0
    roll24_tk_mean: float | None = None
    hours_wet_24h: float = 0.0
    station_code: int = 0


class PredictOut(BaseModel):
    predicted_cr: float
    risk: str
    alarm: bool
    predictions: dict[str, float]
    physics_rate: float
