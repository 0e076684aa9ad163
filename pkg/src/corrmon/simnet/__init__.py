"""Deterministic LoRa sensor-network simulation."""

from .config import NetworkConfig, StationConfig, default_config, default_roster
from .environment import EnvironmentModel, EnvParams
from .network import (
    SensorNetworkSim,
    SimulationResult,
    StationLog,
    clock_offset_bound_ms,
    consolidate,
    transmit,
    write_corpus,
)

__all__ = [
    "NetworkConfig", "StationConfig", "default_config", "default_roster",
    "EnvironmentModel", "EnvParams",
    "SensorNetworkSim", "SimulationResult", "StationLog",
    "clock_offset_bound_ms", "consolidate", "transmit", "write_corpus",
]
