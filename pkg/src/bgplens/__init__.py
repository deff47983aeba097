"""BGP update-stream analysis: pre-RIB reconstruction, windowed AS/path
stability features, and prefix-hijack detectors, on a single node."""

from .core import (
    AsPath,
    EventKind,
    FamilyMismatch,
    NonCanonicalPrefix,
    Prefix,
    PrefixError,
    Segment,
    SegmentKind,
    SetSegmentPresent,
    UpdateEvent,
    WindowId,
    collapse_prepends,
    format_prefix,
    max_prepend_count,
    parse_prefix,
    prefix_contains,
    window_of,
)
from .rib import DeltaAction, Rib, RibDelta, RibEntry, RibSnapshot

__version__ = "0.1.0"

__all__ = [
    "AsPath",
    "DeltaAction",
    "EventKind",
    "FamilyMismatch",
    "NonCanonicalPrefix",
    "Prefix",
    "PrefixError",
    "Rib",
    "RibDelta",
    "RibEntry",
    "RibSnapshot",
    "Segment",
    "SegmentKind",
    "SetSegmentPresent",
    "UpdateEvent",
    "WindowId",
    "collapse_prepends",
    "format_prefix",
    "max_prepend_count",
    "parse_prefix",
    "prefix_contains",
    "window_of",
]
