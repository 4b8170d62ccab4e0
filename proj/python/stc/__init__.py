"""Temporal object-graph store: independently versioned elements, time-relative
navigation and the smart-grid storage benchmark."""

from ._stc import (
    ElementHandle,
    FileLogStore,
    HandleTree,
    InMemoryStore,
    NavigationContext,
    Path,
    StcError,
    TimePoint,
    Trace,
    decode_trace,
    encode_trace,
    smartgrid,
)

__all__ = [
    "ElementHandle",
    "FileLogStore",
    "HandleTree",
    "InMemoryStore",
    "NavigationContext",
    "Path",
    "StcError",
    "TimePoint",
    "Trace",
    "decode_trace",
    "encode_trace",
    "smartgrid",
]
