"""Core value types shared by the whole pipeline: prefixes, AS paths,
update events and analysis windows.

Everything in this module is an immutable value and every operation is a
pure function, so instances can be shared freely between concurrent tasks.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import groupby
from typing import Iterable, Iterator

V4_BITS = 32
V6_BITS = 128
MAX_AS = 0xFFFF_FFFF


class PrefixError(ValueError):
    """Malformed prefix text, unknown family or out-of-range mask."""


class NonCanonicalPrefix(PrefixError):
    """Prefix has bits set beyond its mask length."""


class FamilyMismatch(ValueError):
    """Operands belong to different address families."""


class SetSegmentPresent(ValueError):
    """Path contains an AS_SET segment where only sequences are valid."""


def family_bits(family: int) -> int:
    return V4_BITS if family == 4 else V6_BITS


@dataclass(frozen=True, slots=True, order=True)
class Prefix:
    """A network prefix in canonical form: host bits are always zero."""

    family: int
    network: int
    masklen: int
    # Prefixes key nearly every hot dict in the pipeline; hash once.
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        if self.family not in (4, 6):
            raise PrefixError(f"unknown address family {self.family!r}")
        width = family_bits(self.family)
        if not 0 <= self.masklen <= width:
            raise PrefixError(
                f"mask length {self.masklen} out of range for IPv{self.family}"
            )
        if not 0 <= self.network < (1 << width):
            raise PrefixError("network bits out of range for family")
        if self.network & ((1 << (width - self.masklen)) - 1):
            raise NonCanonicalPrefix(f"host bits set below /{self.masklen}")
        object.__setattr__(
            self, "_hash", hash((self.family, self.network, self.masklen))
        )

    def __hash__(self) -> int:
        return self._hash

    @property
    def width(self) -> int:
        return family_bits(self.family)

    @classmethod
    def parse(cls, text: str) -> "Prefix":
        """Parse "address/len" notation. Host bits must already be zero."""
        addr_part, sep, mask_part = text.partition("/")
        if not sep or not mask_part:
            raise PrefixError(f"expected address/len, got {text!r}")
        try:
            addr = ipaddress.ip_address(addr_part)
        except ValueError as exc:
            raise PrefixError(f"malformed address in {text!r}: {exc}") from exc
        try:
            masklen = int(mask_part)
        except ValueError as exc:
            raise PrefixError(f"malformed mask length in {text!r}") from exc
        return cls(addr.version, int(addr), masklen)

    @classmethod
    def truncate(cls, family: int, network: int, masklen: int) -> "Prefix":
        """Build a prefix, silently zeroing host bits (wire-decode tolerance)."""
        width = family_bits(family)
        if not 0 <= masklen <= width:
            raise PrefixError(f"mask length {masklen} out of range for IPv{family}")
        keep = width - masklen
        return cls(family, (network >> keep) << keep, masklen)

    def contains(self, other: "Prefix") -> bool:
        """True iff this prefix covers ``other`` (a prefix contains itself)."""
        if self.family != other.family:
            raise FamilyMismatch(f"IPv{self.family} vs IPv{other.family}")
        if self.masklen > other.masklen:
            return False
        return ((self.network ^ other.network) >> (self.width - self.masklen)) == 0

    def contains_address(self, address: int) -> bool:
        return ((self.network ^ address) >> (self.width - self.masklen)) == 0

    def __str__(self) -> str:
        return _format_prefix_text(self.family, self.network, self.masklen)


@lru_cache(maxsize=1 << 17)
def _format_prefix_text(family: int, network: int, masklen: int) -> str:
    if family == 4:
        return f"{ipaddress.IPv4Address(network)}/{masklen}"
    return f"{ipaddress.IPv6Address(network)}/{masklen}"


def parse_prefix(text: str) -> Prefix:
    return Prefix.parse(text)


def format_prefix(prefix: Prefix) -> str:
    return str(prefix)


def prefix_contains(outer: Prefix, inner: Prefix) -> bool:
    return outer.contains(inner)


def parse_address(text: str) -> tuple[int, int]:
    """Parse an address into (family, integer value)."""
    try:
        addr = ipaddress.ip_address(text)
    except ValueError as exc:
        raise PrefixError(f"malformed address {text!r}: {exc}") from exc
    return addr.version, int(addr)


def format_address(family: int, value: int) -> str:
    if family == 4:
        return str(ipaddress.IPv4Address(value))
    return str(ipaddress.IPv6Address(value))


class SegmentKind(Enum):
    SEQUENCE = "sequence"
    SET = "set"


@dataclass(frozen=True, slots=True)
class Segment:
    kind: SegmentKind
    asns: tuple[int, ...]
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        if not self.asns:
            raise ValueError("empty path segment")
        for asn in self.asns:
            if not 0 <= asn <= MAX_AS:
                raise ValueError(f"AS number {asn} out of 32-bit range")
        if self.kind is SegmentKind.SET:
            # Set members are unordered; store them canonically.
            object.__setattr__(self, "asns", tuple(sorted(set(self.asns))))
        object.__setattr__(self, "_hash", hash((self.kind, self.asns)))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, slots=True)
class AsPath:
    """An AS path: ordered segments, each a sequence or an (unordered) set."""

    segments: tuple[Segment, ...]
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("empty AS path")
        # Adjacent sequence segments only exist on the wire because of the
        # 255-entry segment limit; merge them so equality is semantic.
        if any(
            a.kind is SegmentKind.SEQUENCE and b.kind is SegmentKind.SEQUENCE
            for a, b in zip(self.segments, self.segments[1:])
        ):
            merged: list[Segment] = []
            for seg in self.segments:
                if (
                    merged
                    and seg.kind is SegmentKind.SEQUENCE
                    and merged[-1].kind is SegmentKind.SEQUENCE
                ):
                    merged[-1] = Segment(
                        SegmentKind.SEQUENCE, merged[-1].asns + seg.asns
                    )
                else:
                    merged.append(seg)
            object.__setattr__(self, "segments", tuple(merged))
        object.__setattr__(self, "_hash", hash(self.segments))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def sequence(cls, asns: Iterable[int]) -> "AsPath":
        return cls((Segment(SegmentKind.SEQUENCE, tuple(asns)),))

    @property
    def has_set(self) -> bool:
        return any(s.kind is SegmentKind.SET for s in self.segments)

    @property
    def hop_length(self) -> int:
        """AS entries across sequence segments, prepends counted."""
        return sum(
            len(s.asns) for s in self.segments if s.kind is SegmentKind.SEQUENCE
        )

    @property
    def origin(self) -> int | None:
        """Origin AS, or None when the path ends in a set segment."""
        last = self.segments[-1]
        if last.kind is SegmentKind.SET:
            return None
        return last.asns[-1]

    def iter_asns(self) -> Iterator[int]:
        for seg in self.segments:
            yield from seg.asns

    def flatten_sequences(self) -> tuple[int, ...]:
        """Concatenated sequence entries; only meaningful when has_set is False."""
        out: list[int] = []
        for seg in self.segments:
            if seg.kind is SegmentKind.SEQUENCE:
                out.extend(seg.asns)
        return tuple(out)

    def sequence_runs(self) -> Iterator[tuple[int, ...]]:
        """Maximal runs of consecutive sequence entries; sets break a run."""
        run: list[int] = []
        for seg in self.segments:
            if seg.kind is SegmentKind.SEQUENCE:
                run.extend(seg.asns)
            elif run:
                yield tuple(run)
                run = []
        if run:
            yield tuple(run)


def collapse_prepends(path: AsPath) -> tuple[int, ...]:
    """Drop consecutive duplicates; non-adjacent repeats (loops) are kept."""
    if path.has_set:
        raise SetSegmentPresent("cannot collapse a path with set segments")
    return tuple(asn for asn, _ in groupby(path.flatten_sequences()))


def max_prepend_count(path: AsPath) -> int:
    """Longest consecutive run of one AS; 1 when nothing is prepended."""
    if path.has_set:
        raise SetSegmentPresent("cannot count prepends on a path with set segments")
    return max(len(tuple(run)) for _, run in groupby(path.flatten_sequences()))


class EventKind(Enum):
    ANNOUNCE = "announce"
    WITHDRAW = "withdraw"


@dataclass(frozen=True, slots=True)
class UpdateEvent:
    """One announcement or withdrawal of one prefix as seen by one peer."""

    ts_sec: int
    ts_usec: int
    vp: str
    peer_addr: str
    peer_as: int
    kind: EventKind
    prefix: Prefix
    path: AsPath | None = None
    origin_as: int | None = None
    next_hop: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.ts_usec < 1_000_000:
            raise ValueError(f"microseconds {self.ts_usec} out of range")
        if self.kind is EventKind.ANNOUNCE:
            if self.path is None:
                raise ValueError("announce event requires a path")
            if self.origin_as != self.path.origin:
                raise ValueError(
                    "origin_as must equal the final sequence entry of the path"
                )
        else:
            if self.path is not None or self.origin_as is not None:
                raise ValueError("withdraw event carries no path")
            if self.next_hop is not None:
                raise ValueError("withdraw event carries no next hop")

    @classmethod
    def announce(
        cls,
        ts_sec: int,
        ts_usec: int,
        vp: str,
        peer_addr: str,
        peer_as: int,
        prefix: Prefix,
        path: AsPath,
        next_hop: str | None = None,
    ) -> "UpdateEvent":
        return cls(
            ts_sec, ts_usec, vp, peer_addr, peer_as,
            EventKind.ANNOUNCE, prefix, path, path.origin, next_hop,
        )

    @classmethod
    def withdraw(
        cls,
        ts_sec: int,
        ts_usec: int,
        vp: str,
        peer_addr: str,
        peer_as: int,
        prefix: Prefix,
    ) -> "UpdateEvent":
        return cls(ts_sec, ts_usec, vp, peer_addr, peer_as, EventKind.WITHDRAW, prefix)

    @property
    def t_us(self) -> int:
        """Event time as integer microseconds since the epoch."""
        return self.ts_sec * 1_000_000 + self.ts_usec

    @property
    def peer(self) -> tuple[str, int]:
        return (self.peer_addr, self.peer_as)

    @property
    def rib_key(self) -> tuple[str, str, int]:
        return (self.vp, self.peer_addr, self.peer_as)


@dataclass(frozen=True, slots=True, order=True)
class WindowId:
    """A half-open aggregation window [start, start+interval) in seconds."""

    start: int
    interval: int

    def __post_init__(self) -> None:
        if self.interval <= 0:
            raise ValueError("window interval must be positive")
        if self.start % self.interval:
            raise ValueError(
                f"window start {self.start} not aligned to interval {self.interval}"
            )

    @property
    def end(self) -> int:
        return self.start + self.interval

    def next(self) -> "WindowId":
        return WindowId(self.start + self.interval, self.interval)

    def contains_second(self, ts_sec: int) -> bool:
        return self.start <= ts_sec < self.end


def window_of(ts_sec: int, interval: int) -> WindowId:
    if interval <= 0:
        raise ValueError("window interval must be positive")
    return WindowId((ts_sec // interval) * interval, interval)
