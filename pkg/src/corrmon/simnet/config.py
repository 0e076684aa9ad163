"""Network configuration: station roster, clock drifts, transport knobs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

STATION_KINDS = ("TH", "THV", "THVDR")
PLACEMENTS = ("indoor", "doorway", "roof", "tower")

DRIFT_PPM_LIMIT = 200.0


@dataclass(frozen=True)
class StationConfig:
    id: str
    kind: str
    placement: str
    drift_ppm: float = 0.0
    # Microclimate bias relative to the shared outdoor environment.
    dt_c: float = 0.0
    drh_pct: float = 0.0

    def __post_init__(self):
        if self.kind not in STATION_KINDS:
            raise ValueError(f"unknown station kind {self.kind!r}")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"unknown placement {self.placement!r}")
        if not -DRIFT_PPM_LIMIT <= self.drift_ppm <= DRIFT_PPM_LIMIT:
            raise ValueError(f"drift_ppm out of [-200, 200]: {self.drift_ppm}")

    @property
    def measures_wind(self) -> bool:
        return self.kind in ("THV", "THVDR")

    @property
    def measures_rain(self) -> bool:
        return self.kind == "THVDR"


@dataclass
class NetworkConfig:
    stations: list = field(default_factory=list)
    gateway_drift_ppm: float = 0.0
    start: str = "2021-01-01T00:00"
    loss_p: float = 0.0
    retransmit: bool = False
    uplink_minutes: int = 10
    station_sync_seconds: int = 60
    gateway_sync_minutes: int = 10

    def __post_init__(self):
        ids = [s.id for s in self.stations]
        if len(set(ids)) != len(ids):
            raise ValueError("station ids must be unique")
        if not 0.0 <= self.loss_p <= 1.0:
            raise ValueError(f"loss_p out of [0,1]: {self.loss_p}")

    @classmethod
    def from_json(cls, path: str) -> "NetworkConfig":
        with open(path) as fh:
            doc = json.load(fh)
        stations = [StationConfig(**s) for s in doc.pop("stations")]
        return cls(stations=stations, **doc)

    def to_json(self, path: str) -> None:
        doc = {
            "gateway_drift_ppm": self.gateway_drift_ppm,
            "start": self.start,
            "loss_p": self.loss_p,
            "retransmit": self.retransmit,
            "uplink_minutes": self.uplink_minutes,
            "station_sync_seconds": self.station_sync_seconds,
            "gateway_sync_minutes": self.gateway_sync_minutes,
            "stations": [vars(s) for s in self.stations],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)


# Deterministic, slightly varied per-station drifts for the default roster.
_DEFAULT_DRIFTS = [12.0, -35.0, 48.0, -8.0, 22.0, -55.0, 31.0, 5.0, -18.0,
                   40.0, -27.0, 15.0, -44.0, 9.0]


def default_roster(drift_ppm: float | None = None) -> list:
    """The deployed layout: 10 indoor TH, doorway/roof THV, one tower THVDR."""
    stations = []
    for i in range(10):
        stations.append(StationConfig(
            id=f"ST{i + 1:02d}", kind="TH", placement="indoor",
            drift_ppm=drift_ppm if drift_ppm is not None else _DEFAULT_DRIFTS[i],
            dt_c=1.2 - 0.1 * i, drh_pct=-4.0 + 0.3 * i))
    for i, placement in enumerate(("doorway", "doorway", "roof")):
        stations.append(StationConfig(
            id=f"ST{i + 11:02d}", kind="THV", placement=placement,
            drift_ppm=drift_ppm if drift_ppm is not None else _DEFAULT_DRIFTS[10 + i],
            dt_c=0.2, drh_pct=1.0))
    stations.append(StationConfig(
        id="ST14", kind="THVDR", placement="tower",
        drift_ppm=drift_ppm if drift_ppm is not None else _DEFAULT_DRIFTS[13],
        dt_c=-0.5, drh_pct=2.0))
    return stations


def default_config(**overrides) -> NetworkConfig:
    drift = overrides.pop("drift_ppm", None)
    return NetworkConfig(stations=default_roster(drift), **overrides)
