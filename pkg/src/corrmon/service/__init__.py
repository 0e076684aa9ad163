"""Live monitoring service: tick engine plus HTTP API."""

from .app import create_app
from .engine import (
    EVENT_KINDS,
    MITIGATION_KINDS,
    Mitigation,
    MonitorEngine,
    UnknownEventError,
    UnknownMitigationError,
)

__all__ = [
    "create_app", "MonitorEngine", "Mitigation",
    "EVENT_KINDS", "MITIGATION_KINDS",
    "UnknownEventError", "UnknownMitigationError",
]
