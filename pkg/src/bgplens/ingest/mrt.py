"""MRT binary archive decoding (RFC 6396 subset).

Supported records:
  BGP4MP / BGP4MP_ET      message subtypes 1 (2-byte AS) and 4 (4-byte AS)
  TABLE_DUMP_V2           peer index table + RIB IPv4 unicast (RIB bootstrap)

Everything else is counted and skipped; live archives are heterogeneous and
one unknown record must never abort a replay. The decoder keeps pre-RIB
fidelity: every withdrawn prefix and every NLRI prefix in an UPDATE becomes
its own event, no best-path filtering anywhere.

Common header layout (big-endian): 4B timestamp, 2B type, 2B subtype,
4B length. Extended-timestamp types carry 4 microsecond bytes as the first
message bytes, included in the declared length.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Iterator

from ..core import (
    AsPath,
    Prefix,
    Segment,
    SegmentKind,
    UpdateEvent,
    family_bits,
    format_address,
)

MRT_HEADER = struct.Struct(">IHHI")

TYPE_TABLE_DUMP_V2 = 13
TYPE_BGP4MP = 16
TYPE_BGP4MP_ET = 17

BGP4MP_STATE_CHANGE = 0
BGP4MP_MESSAGE = 1
BGP4MP_MESSAGE_AS4 = 4
BGP4MP_STATE_CHANGE_AS4 = 5

TDV2_PEER_INDEX_TABLE = 1
TDV2_RIB_IPV4_UNICAST = 2

AFI_IPV4 = 1
AFI_IPV6 = 2

BGP_MSG_UPDATE = 2
BGP_MARKER_LEN = 16
BGP_HEADER_LEN = 19

ATTR_ORIGIN = 1
ATTR_AS_PATH = 2
ATTR_NEXT_HOP = 3
ATTR_AS4_PATH = 17
ATTR_FLAG_EXTENDED_LENGTH = 0x10

SEG_AS_SET = 1
SEG_AS_SEQUENCE = 2


class MrtError(Exception):
    """Base for all MRT decode errors; carries the record's byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (offset {offset})")
        self.offset = offset


class TruncatedHeader(MrtError):
    pass


class TruncatedPayload(MrtError):
    pass


class MalformedMrt(MrtError):
    """Record structure does not decode (framing, lengths, families)."""


class MalformedAttributes(MalformedMrt):
    pass


class PathMissingForAnnounce(MalformedMrt):
    pass


class UnsupportedSubtype(MrtError):
    """Record type/subtype outside the supported subset; skippable."""


@dataclass(frozen=True, slots=True)
class MrtRecord:
    ts_sec: int
    ts_usec: int
    mrt_type: int
    subtype: int
    payload: bytes
    offset: int = 0


def read_mrt_records(stream: BinaryIO) -> Iterator[MrtRecord]:
    """Yield records in file order; stops cleanly at end of stream.

    Raises TruncatedHeader / TruncatedPayload with the byte offset of the
    record that could not be completed.
    """
    offset = 0
    while True:
        header = stream.read(MRT_HEADER.size)
        if not header:
            return
        if len(header) < MRT_HEADER.size:
            raise TruncatedHeader(
                f"{len(header)} bytes left, header needs {MRT_HEADER.size}", offset
            )
        ts_sec, mrt_type, subtype, length = MRT_HEADER.unpack(header)
        payload = stream.read(length)
        if len(payload) < length:
            raise TruncatedPayload(
                f"payload declared {length} bytes, got {len(payload)}", offset
            )
        ts_usec = 0
        if mrt_type == TYPE_BGP4MP_ET and len(payload) >= 4:
            ts_usec = struct.unpack_from(">I", payload)[0]
        yield MrtRecord(ts_sec, ts_usec, mrt_type, subtype, payload, offset)
        offset += MRT_HEADER.size + length


class _Cursor:
    """Bounds-checked reader over one record payload."""

    __slots__ = ("data", "pos", "offset")

    def __init__(self, data: bytes, offset: int, pos: int = 0):
        self.data = data
        self.pos = pos
        self.offset = offset

    def remaining(self) -> int:
        return len(self.data) - self.pos

    def take(self, n: int) -> bytes:
        if self.remaining() < n:
            raise MalformedMrt(
                f"needed {n} bytes, {self.remaining()} left in record", self.offset
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")


def _read_nlri(cursor: _Cursor, family: int, end: int) -> list[Prefix]:
    """Prefix list encoding: 1B mask length + just enough bytes of address."""
    width = family_bits(family)
    prefixes = []
    while cursor.pos < end:
        plen = cursor.u8()
        if plen > width:
            raise MalformedMrt(f"prefix length {plen} exceeds /{width}", cursor.offset)
        nbytes = (plen + 7) // 8
        if cursor.pos + nbytes > end:
            raise MalformedMrt("prefix bytes run past field boundary", cursor.offset)
        chunk = cursor.take(nbytes)
        network = int.from_bytes(chunk, "big") << (width - 8 * nbytes)
        # Tolerate set host bits in the padding (canonicalised here).
        prefixes.append(Prefix.truncate(family, network, plen))
    if cursor.pos != end:
        raise MalformedMrt("prefix list overran its declared length", cursor.offset)
    return prefixes


def _read_as_path(data: bytes, as_size: int, offset: int) -> AsPath | None:
    segments = []
    pos = 0
    while pos < len(data):
        if pos + 2 > len(data):
            raise MalformedAttributes("truncated path segment header", offset)
        seg_type = data[pos]
        count = data[pos + 1]
        pos += 2
        need = count * as_size
        if pos + need > len(data):
            raise MalformedAttributes("truncated path segment body", offset)
        asns = tuple(
            int.from_bytes(data[pos + i * as_size : pos + (i + 1) * as_size], "big")
            for i in range(count)
        )
        pos += need
        if seg_type == SEG_AS_SEQUENCE:
            kind = SegmentKind.SEQUENCE
        elif seg_type == SEG_AS_SET:
            kind = SegmentKind.SET
        else:
            raise MalformedAttributes(f"unknown path segment type {seg_type}", offset)
        if count == 0:
            raise MalformedAttributes("empty path segment", offset)
        segments.append(Segment(kind, asns))
    if not segments:
        return None
    return AsPath(tuple(segments))


@dataclass
class _Attributes:
    as_path: AsPath | None = None
    as4_path: AsPath | None = None
    next_hop: str | None = None


def _read_attributes(cursor: _Cursor, end: int, as_size: int) -> _Attributes:
    attrs = _Attributes()
    while cursor.pos < end:
        if cursor.pos + 3 > end:
            raise MalformedAttributes("truncated attribute header", cursor.offset)
        flags = cursor.u8()
        attr_type = cursor.u8()
        if flags & ATTR_FLAG_EXTENDED_LENGTH:
            if cursor.pos + 2 > end:
                raise MalformedAttributes("truncated attribute length", cursor.offset)
            attr_len = cursor.u16()
        else:
            attr_len = cursor.u8()
        if cursor.pos + attr_len > end:
            raise MalformedAttributes("attribute overruns attribute field", cursor.offset)
        value = cursor.take(attr_len)
        if attr_type == ATTR_AS_PATH:
            attrs.as_path = _read_as_path(value, as_size, cursor.offset)
        elif attr_type == ATTR_AS4_PATH:
            attrs.as4_path = _read_as_path(value, 4, cursor.offset)
        elif attr_type == ATTR_NEXT_HOP:
            if attr_len == 4:
                attrs.next_hop = format_address(4, int.from_bytes(value, "big"))
            elif attr_len == 16:
                attrs.next_hop = format_address(6, int.from_bytes(value, "big"))
            else:
                raise MalformedAttributes(
                    f"next hop of {attr_len} bytes", cursor.offset
                )
        # ORIGIN and everything else: retained in the raw record, not modelled.
    return attrs


def _merge_as4(as_path: AsPath, as4_path: AsPath) -> AsPath:
    """RFC 6793 reconciliation for 2-byte-AS records carrying AS4_PATH.

    The AS4_PATH replaces the trailing segments of the AS_PATH it shadows;
    when it claims more hops than the AS_PATH has, it is ignored.
    """

    def seg_hops(path: AsPath) -> int:
        return sum(
            len(s.asns) if s.kind is SegmentKind.SEQUENCE else 1
            for s in path.segments
        )

    old_n = seg_hops(as_path)
    new_n = seg_hops(as4_path)
    if new_n > old_n:
        return as_path
    lead = old_n - new_n
    head: list[Segment] = []
    for seg in as_path.segments:
        if lead == 0:
            break
        if seg.kind is SegmentKind.SET:
            head.append(seg)
            lead -= 1
        elif len(seg.asns) <= lead:
            head.append(seg)
            lead -= len(seg.asns)
        else:
            head.append(Segment(SegmentKind.SEQUENCE, seg.asns[:lead]))
            lead = 0
    return AsPath(tuple(head) + as4_path.segments)


def decode_bgp4mp_update(record: MrtRecord, collector: str) -> list[UpdateEvent]:
    """Decode one BGP4MP message record into events, withdrawals first.

    Non-UPDATE BGP messages (keepalive, open, notification) yield no events.
    Raises UnsupportedSubtype for record types outside the supported set.
    """
    if record.mrt_type not in (TYPE_BGP4MP, TYPE_BGP4MP_ET):
        raise UnsupportedSubtype(
            f"mrt type {record.mrt_type} not a BGP4MP record", record.offset
        )
    if record.subtype not in (BGP4MP_MESSAGE, BGP4MP_MESSAGE_AS4):
        raise UnsupportedSubtype(
            f"BGP4MP subtype {record.subtype} unsupported", record.offset
        )

    cursor = _Cursor(record.payload, record.offset)
    ts_usec = 0
    if record.mrt_type == TYPE_BGP4MP_ET:
        ts_usec = cursor.u32()
        if ts_usec >= 1_000_000:
            raise MalformedMrt(f"microseconds {ts_usec} out of range", record.offset)

    as_size = 4 if record.subtype == BGP4MP_MESSAGE_AS4 else 2
    peer_as = int.from_bytes(cursor.take(as_size), "big")
    cursor.take(as_size)  # local AS
    cursor.take(2)        # interface index
    afi = cursor.u16()
    if afi == AFI_IPV4:
        family, addr_len = 4, 4
    elif afi == AFI_IPV6:
        family, addr_len = 6, 16
    else:
        raise MalformedMrt(f"unknown address family {afi}", record.offset)
    peer_addr = format_address(family, int.from_bytes(cursor.take(addr_len), "big"))
    cursor.take(addr_len)  # local address

    # BGP message: 16B marker, 2B length (marker included), 1B type.
    cursor.take(BGP_MARKER_LEN)
    bgp_len = cursor.u16()
    bgp_type = cursor.u8()
    if bgp_len < BGP_HEADER_LEN:
        raise MalformedMrt(f"BGP message length {bgp_len} too small", record.offset)
    body_len = bgp_len - BGP_HEADER_LEN
    if cursor.remaining() < body_len:
        raise MalformedMrt("BGP message overruns MRT payload", record.offset)
    if bgp_type != BGP_MSG_UPDATE:
        return []

    msg_end = cursor.pos + body_len
    withdrawn_len = cursor.u16()
    if cursor.pos + withdrawn_len > msg_end:
        raise MalformedMrt("withdrawn routes overrun message", record.offset)
    withdrawn = _read_nlri(cursor, family, cursor.pos + withdrawn_len)
    attr_len = cursor.u16()
    if cursor.pos + attr_len > msg_end:
        raise MalformedAttributes("attributes overrun message", record.offset)
    attrs = _read_attributes(cursor, cursor.pos + attr_len, as_size)
    nlri = _read_nlri(cursor, family, msg_end)

    path = attrs.as_path
    if as_size == 2 and path is not None and attrs.as4_path is not None:
        path = _merge_as4(path, attrs.as4_path)
    if nlri and path is None:
        raise PathMissingForAnnounce("UPDATE announces prefixes without an AS path", record.offset)

    events = [
        UpdateEvent.withdraw(record.ts_sec, ts_usec, collector, peer_addr, peer_as, p)
        for p in withdrawn
    ]
    events.extend(
        UpdateEvent.announce(
            record.ts_sec, ts_usec, collector, peer_addr, peer_as, p, path,
            attrs.next_hop,
        )
        for p in nlri
    )
    return events


@dataclass
class DecodeStats:
    records: int = 0
    events: int = 0
    unsupported: int = 0
    malformed: int = 0
    non_update: int = 0
    truncated: str | None = None

    @property
    def skipped(self) -> int:
        return self.unsupported + self.malformed


class MrtDecoder:
    """Stateful per-file decoder: BGP4MP messages plus TABLE_DUMP_V2 bootstrap.

    TABLE_DUMP_V2 RIB records refer to peers by index into the most recent
    peer index table, so records of one file must be fed in file order.
    """

    def __init__(self, collector: str):
        self.collector = collector
        self._peers: list[tuple[str, int]] | None = None

    def decode_record(self, record: MrtRecord) -> list[UpdateEvent]:
        if record.mrt_type in (TYPE_BGP4MP, TYPE_BGP4MP_ET):
            return decode_bgp4mp_update(record, self.collector)
        if record.mrt_type == TYPE_TABLE_DUMP_V2:
            if record.subtype == TDV2_PEER_INDEX_TABLE:
                self._peers = _read_peer_index(record)
                return []
            if record.subtype == TDV2_RIB_IPV4_UNICAST:
                return self._decode_rib(record)
            raise UnsupportedSubtype(
                f"TABLE_DUMP_V2 subtype {record.subtype} unsupported", record.offset
            )
        raise UnsupportedSubtype(f"mrt type {record.mrt_type} unsupported", record.offset)

    def _decode_rib(self, record: MrtRecord) -> list[UpdateEvent]:
        if self._peers is None:
            raise MalformedMrt("RIB record before peer index table", record.offset)
        cursor = _Cursor(record.payload, record.offset)
        cursor.u32()  # sequence number
        plen = cursor.u8()
        if plen > 32:
            raise MalformedMrt(f"prefix length {plen} exceeds /32", record.offset)
        nbytes = (plen + 7) // 8
        network = int.from_bytes(cursor.take(nbytes), "big") << (32 - 8 * nbytes)
        prefix = Prefix.truncate(4, network, plen)
        entry_count = cursor.u16()
        events = []
        for _ in range(entry_count):
            peer_index = cursor.u16()
            cursor.u32()  # originated time; bootstrap applies at dump time
            attr_len = cursor.u16()
            attrs = _read_attributes(cursor, cursor.pos + attr_len, 4)
            if peer_index >= len(self._peers):
                raise MalformedMrt(f"peer index {peer_index} out of table", record.offset)
            if attrs.as_path is None:
                raise PathMissingForAnnounce("RIB entry without an AS path", record.offset)
            peer_addr, peer_as = self._peers[peer_index]
            events.append(
                UpdateEvent.announce(
                    record.ts_sec, 0, self.collector, peer_addr, peer_as,
                    prefix, attrs.as_path, attrs.next_hop,
                )
            )
        return events


def _read_peer_index(record: MrtRecord) -> list[tuple[str, int]]:
    cursor = _Cursor(record.payload, record.offset)
    cursor.u32()  # collector BGP id
    view_len = cursor.u16()
    cursor.take(view_len)
    count = cursor.u16()
    peers = []
    for _ in range(count):
        peer_type = cursor.u8()
        cursor.u32()  # peer BGP id
        if peer_type & 0x01:
            addr = format_address(6, int.from_bytes(cursor.take(16), "big"))
        else:
            addr = format_address(4, int.from_bytes(cursor.take(4), "big"))
        if peer_type & 0x02:
            peer_as = cursor.u32()
        else:
            peer_as = cursor.u16()
        peers.append((addr, peer_as))
    return peers


def decode_stream(
    stream: BinaryIO, collector: str, stats: DecodeStats | None = None
) -> Iterator[UpdateEvent]:
    """Total decode of a whole stream: events out, problems counted.

    Arbitrary bytes never raise; unsupported and malformed records are
    counted in ``stats`` and skipped, truncation ends the stream.
    """
    if stats is None:
        stats = DecodeStats()
    decoder = MrtDecoder(collector)
    records = read_mrt_records(stream)
    while True:
        try:
            record = next(records)
        except StopIteration:
            return
        except (TruncatedHeader, TruncatedPayload) as exc:
            stats.truncated = str(exc)
            return
        stats.records += 1
        try:
            events = decoder.decode_record(record)
        except UnsupportedSubtype:
            stats.unsupported += 1
            continue
        except (MrtError, ValueError):
            stats.malformed += 1
            continue
        if not events and record.mrt_type in (TYPE_BGP4MP, TYPE_BGP4MP_ET):
            stats.non_update += 1
        stats.events += len(events)
        yield from events
