"""HTTP layer over the monitoring engine.

The engine owns all state; this module only translates between HTTP and
engine calls.  A background thread advances the engine at a fixed cadence
(disabled when tick_ms is None, which the tests and batch tools use).
"""

from __future__ import annotations

import json
import threading
import time
from contextlib import asynccontextmanager

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..physics import classify_risk, corrosion_rate
from ..schema import FEATURE_COLUMNS
from .engine import MonitorEngine, UnknownEventError, UnknownMitigationError
from .schemas import (
    EventIn,
    EventOut,
    HistoryOut,
    MitigationIn,
    MitigationOut,
    ModelsOut,
    PredictIn,
    PredictOut,
    SelectModelIn,
    StateOut,
)


def create_app(engine: MonitorEngine, tick_ms: int | None = 2000,
               static_dir: str | None = None) -> FastAPI:
    stop = threading.Event()

    def ticker():
        while not stop.wait(tick_ms / 1000.0):
            engine.tick()

    @asynccontextmanager
    async def lifespan(app):
        if tick_ms is not None:
            thread = threading.Thread(target=ticker, daemon=True)
            app.state.ticker_thread = thread
            thread.start()
        yield
        stop.set()

    app = FastAPI(title="corrmon", version="1.0", lifespan=lifespan)
    app.state.engine = engine
    app.state.tick_ms = tick_ms

    @app.get("/api/state", response_model=StateOut)
    def get_state():
        return engine.state

    @app.get("/api/history", response_model=HistoryOut)
    def get_history(n: int = 100):
        return {"states": engine.recent_history(n)}

    @app.get("/api/models", response_model=ModelsOut)
    def get_models():
        return {"families": sorted(engine.models),
                "active": engine.active_family or "contingency",
                "metrics": engine.model_metrics}

    @app.post("/api/models/select", response_model=ModelsOut)
    def select_model(body: SelectModelIn):
        try:
            engine.select_model(body.family)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return get_models()

    @app.post("/api/event", response_model=EventOut)
    def post_event(body: EventIn):
        try:
            return engine.inject_event(body.kind, body.magnitude, body.duration)
        except (UnknownEventError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/api/mitigation", response_model=MitigationOut)
    def post_mitigation(body: MitigationIn):
        try:
            mit = engine.activate_mitigation(body.kind, body.strength)
        except UnknownMitigationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"kind": mit.kind, "strength": mit.strength,
                "since_tick": mit.since_tick, "active": True}

    @app.delete("/api/mitigation/{kind}", response_model=MitigationOut)
    def delete_mitigation(kind: str):
        mit = engine.mitigations.get(kind)
        if not engine.deactivate_mitigation(kind):
            raise HTTPException(status_code=404, detail=f"{kind} not active")
        return {"kind": mit.kind, "strength": mit.strength,
                "since_tick": mit.since_tick, "active": False}

    @app.post("/api/tick", response_model=StateOut)
    def post_tick():
        return engine.tick()

    @app.post("/api/predict", response_model=PredictOut)
    def post_predict(body: PredictIn):
        values = {
            "temp_c": body.temp_c,
            "rh_pct": body.rh_pct,
            "temp_k": body.temp_c + 273.15,
            "rh_frac": body.rh_pct / 100.0,
            "roll24_rh_mean": (body.rh_pct / 100.0 if body.roll24_rh_mean is None
                               else body.roll24_rh_mean),
            "roll24_rh_std": body.roll24_rh_std,
            "roll24_tk_mean": (body.temp_c + 273.15 if body.roll24_tk_mean is None
                               else body.roll24_tk_mean),
            "hours_wet_24h": body.hours_wet_24h,
            "station_code": float(body.station_code),
        }
        x = np.array([[values[c] for c in FEATURE_COLUMNS]])
        predictions = {family: float(model.predict(x)[0])
                       for family, model in engine.models.items()}
        physics = corrosion_rate(engine.params, body.temp_c, body.rh_pct / 100.0)
        headline = (predictions[engine.active_family]
                    if engine.active_family else physics)
        headline = max(headline, 0.0)
        risk = classify_risk(headline, engine.alarm_threshold)
        return {"predicted_cr": headline, "risk": risk.label, "alarm": risk.alarm,
                "predictions": predictions, "physics_rate": physics}

    @app.get("/api/stream")
    def stream(limit: int | None = None):
        def gen():
            last = -1
            sent = 0
            poll = 0.02 if tick_ms is None else min(tick_ms / 1000.0 / 4, 0.25)
            while limit is None or sent < limit:
                state = engine.state
                if state is not None and state["tick"] != last:
                    last = state["tick"]
                    sent += 1
                    yield f"data: {json.dumps(state)}\n\n"
                else:
                    time.sleep(poll)
        return StreamingResponse(gen(), media_type="text/event-stream")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True))
    return app
