"""Normalized line format, the pipeline's lingua franca.

One update event per line, pipe-separated:

    ts|vp|peer_addr|peer_as|kind|prefix|path|next_hop

ts is "seconds.microseconds" with a fixed 6-digit fraction; kind is
"announce" or "withdraw"; path is a space-separated AS list with set
segments written "{a,b}"; withdraw lines leave path and next_hop empty.
Lines are independently parseable, so segment files can be split and
replayed from any line boundary.
"""

from __future__ import annotations

from ..core import (
    AsPath,
    EventKind,
    PrefixError,
    Segment,
    SegmentKind,
    UpdateEvent,
    parse_address,
    parse_prefix,
)

FIELDS = ("ts", "vp", "peer_addr", "peer_as", "kind", "prefix", "path", "next_hop")


class EventLineError(ValueError):
    """Line does not parse as a single update event."""


def path_to_text(path: AsPath) -> str:
    parts = []
    for seg in path.segments:
        if seg.kind is SegmentKind.SEQUENCE:
            parts.extend(str(asn) for asn in seg.asns)
        else:
            parts.append("{%s}" % ",".join(str(asn) for asn in seg.asns))
    return " ".join(parts)


def path_from_text(text: str) -> AsPath:
    segments: list[Segment] = []
    run: list[int] = []
    for token in text.split():
        if token.startswith("{"):
            if not token.endswith("}"):
                raise EventLineError(f"malformed set segment {token!r}")
            if run:
                segments.append(Segment(SegmentKind.SEQUENCE, tuple(run)))
                run = []
            try:
                members = tuple(int(m) for m in token[1:-1].split(","))
            except ValueError as exc:
                raise EventLineError(f"malformed set segment {token!r}") from exc
            segments.append(Segment(SegmentKind.SET, members))
        else:
            try:
                run.append(int(token))
            except ValueError as exc:
                raise EventLineError(f"malformed AS number {token!r}") from exc
    if run:
        segments.append(Segment(SegmentKind.SEQUENCE, tuple(run)))
    if not segments:
        raise EventLineError("empty path")
    try:
        return AsPath(tuple(segments))
    except ValueError as exc:
        raise EventLineError(str(exc)) from exc


def encode_event_line(event: UpdateEvent) -> str:
    if "|" in event.vp:
        raise EventLineError(f"vantage point id {event.vp!r} contains a separator")
    ts = f"{event.ts_sec}.{event.ts_usec:06d}"
    path = path_to_text(event.path) if event.path is not None else ""
    next_hop = event.next_hop or ""
    return "|".join(
        (
            ts,
            event.vp,
            event.peer_addr,
            str(event.peer_as),
            event.kind.value,
            str(event.prefix),
            path,
            next_hop,
        )
    )


def parse_event_line(text: str) -> UpdateEvent:
    fields = text.rstrip("\n").split("|")
    if len(fields) != len(FIELDS):
        raise EventLineError(
            f"expected {len(FIELDS)} fields, got {len(fields)}: {text!r}"
        )
    ts_text, vp, peer_addr, peer_as_text, kind_text, prefix_text, path_text, next_hop = fields
    sec_text, _, usec_text = ts_text.partition(".")
    try:
        ts_sec = int(sec_text)
        ts_usec = int(usec_text) if usec_text else 0
    except ValueError as exc:
        raise EventLineError(f"malformed timestamp {ts_text!r}") from exc
    if usec_text and len(usec_text) != 6:
        raise EventLineError(f"timestamp fraction must be 6 digits: {ts_text!r}")
    if not vp:
        raise EventLineError("missing vantage point")
    try:
        parse_address(peer_addr)
    except PrefixError as exc:
        raise EventLineError(f"malformed peer address {peer_addr!r}") from exc
    try:
        peer_as = int(peer_as_text)
    except ValueError as exc:
        raise EventLineError(f"malformed peer AS {peer_as_text!r}") from exc
    try:
        kind = EventKind(kind_text)
    except ValueError as exc:
        raise EventLineError(f"unknown kind {kind_text!r}") from exc
    try:
        prefix = parse_prefix(prefix_text)
    except PrefixError as exc:
        raise EventLineError(str(exc)) from exc

    if kind is EventKind.WITHDRAW:
        if path_text:
            raise EventLineError("withdraw line carries a path")
        if next_hop:
            raise EventLineError("withdraw line carries a next hop")
        return UpdateEvent.withdraw(ts_sec, ts_usec, vp, peer_addr, peer_as, prefix)

    if not path_text:
        raise EventLineError("announce line missing its path")
    path = path_from_text(path_text)
    try:
        return UpdateEvent.announce(
            ts_sec, ts_usec, vp, peer_addr, peer_as, prefix, path,
            next_hop or None,
        )
    except ValueError as exc:
        raise EventLineError(str(exc)) from exc
