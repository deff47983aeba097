from .eventline import EventLineError, encode_event_line, parse_event_line
from .mrt import (
    MalformedAttributes,
    MalformedMrt,
    MrtDecoder,
    MrtError,
    MrtRecord,
    PathMissingForAnnounce,
    TruncatedHeader,
    TruncatedPayload,
    UnsupportedSubtype,
    decode_bgp4mp_update,
    decode_stream,
    read_mrt_records,
)

__all__ = [
    "EventLineError",
    "encode_event_line",
    "parse_event_line",
    "MalformedAttributes",
    "MalformedMrt",
    "MrtDecoder",
    "MrtError",
    "MrtRecord",
    "PathMissingForAnnounce",
    "TruncatedHeader",
    "TruncatedPayload",
    "UnsupportedSubtype",
    "decode_bgp4mp_update",
    "decode_stream",
    "read_mrt_records",
]
