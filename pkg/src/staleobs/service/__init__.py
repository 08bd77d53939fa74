"""Persistence and workflow layer: patient records, update sessions, HTTP API."""

from .config import ServiceConfig, load_config
from .store import (
    AuditEntry,
    ConflictError,
    PatientRecord,
    RecordStore,
    StoreError,
    UpdateSession,
)

__all__ = [
    "AuditEntry",
    "ConflictError",
    "PatientRecord",
    "RecordStore",
    "ServiceConfig",
    "StoreError",
    "UpdateSession",
    "load_config",
    "create_app",
]


def create_app(config: ServiceConfig, store: RecordStore | None = None):
    # imported lazily so the core library works without fastapi installed
    from .app import create_app as _create_app

    return _create_app(config, store=store)
