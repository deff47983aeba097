"""Per-(vantage point, peer) pre-RIB state.

The RIB keeps every path the peer currently announces; there is no
best-path selection anywhere in this module. One writer owns a Rib;
snapshots are immutable and can be shared across readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .core import AsPath, EventKind, Prefix, UpdateEvent, parse_address
from .trie import PrefixMap


class WrongRibOwner(ValueError):
    """Event routed to a RIB owned by a different (vantage point, peer)."""


@dataclass(frozen=True, slots=True)
class RibEntry:
    prefix: Prefix
    path: AsPath
    origin_as: int | None
    installed_at: int            # microseconds since epoch
    last_changed_at: int

    def __post_init__(self) -> None:
        if self.last_changed_at < self.installed_at:
            raise ValueError("last_changed_at precedes installed_at")


class DeltaAction(Enum):
    INSTALLED = "installed"
    REPLACED = "replaced"
    REMOVED = "removed"
    NOOP = "noop"


@dataclass(frozen=True, slots=True)
class RibDelta:
    action: DeltaAction
    prefix: Prefix
    old_path: AsPath | None
    new_path: AsPath | None
    path_changed: bool


class Rib:
    """Mutable per-peer table; apply_event is the only mutator besides clear."""

    __slots__ = ("vp", "peer_addr", "peer_as", "_view")

    def __init__(self, vp: str, peer_addr: str, peer_as: int):
        self.vp = vp
        self.peer_addr = peer_addr
        self.peer_as = peer_as
        self._view = PrefixMap()

    def __len__(self) -> int:
        return len(self._view)

    def apply_event(self, event: UpdateEvent) -> RibDelta:
        if (
            event.vp != self.vp
            or event.peer_addr != self.peer_addr
            or event.peer_as != self.peer_as
        ):
            raise WrongRibOwner(
                f"event from {event.rib_key} applied to rib {(self.vp, self.peer_addr, self.peer_as)}"
            )
        prefix = event.prefix
        if event.kind is EventKind.ANNOUNCE:
            current: RibEntry | None = self._view.get(prefix)
            if current is None:
                t = event.t_us
                self._view.set(
                    prefix, RibEntry(prefix, event.path, event.origin_as, t, t)
                )
                return RibDelta(DeltaAction.INSTALLED, prefix, None, event.path, True)
            if current.path == event.path:
                return RibDelta(DeltaAction.NOOP, prefix, current.path, event.path, False)
            self._view.set(
                prefix,
                RibEntry(
                    prefix, event.path, event.origin_as,
                    current.installed_at, event.t_us,
                ),
            )
            return RibDelta(DeltaAction.REPLACED, prefix, current.path, event.path, True)
        removed: RibEntry | None = self._view.delete(prefix)
        if removed is None:
            return RibDelta(DeltaAction.NOOP, prefix, None, None, False)
        return RibDelta(DeltaAction.REMOVED, prefix, removed.path, None, True)

    def clear(self) -> list[RibDelta]:
        """Drop every entry (session reset), emitting Removed deltas for each."""
        deltas = [
            RibDelta(DeltaAction.REMOVED, entry.prefix, entry.path, None, True)
            for entry in self._view.values()
        ]
        self._view = PrefixMap()
        return deltas

    def snapshot(self) -> "RibSnapshot":
        return RibSnapshot(self.vp, self.peer_addr, self.peer_as, self._view.snapshot())

    def entries(self) -> Iterator[RibEntry]:
        """Live view of the current entries; only for the owning writer."""
        return self._view.values()

    def node_count(self) -> int:
        return self._view.node_count()


class RibSnapshot:
    """Point-in-time view of a Rib; unaffected by later apply_event calls."""

    __slots__ = ("vp", "peer_addr", "peer_as", "_view")

    def __init__(self, vp: str, peer_addr: str, peer_as: int, view: PrefixMap):
        self.vp = vp
        self.peer_addr = peer_addr
        self.peer_as = peer_as
        self._view = view

    def __len__(self) -> int:
        return len(self._view)

    def get(self, prefix: Prefix) -> RibEntry | None:
        return self._view.get(prefix)

    def entries(self) -> Iterator[RibEntry]:
        """Entries in deterministic (family, network, mask length) order."""
        return self._view.values()

    def lookup_lpm(self, address: str) -> RibEntry | None:
        """Longest-prefix-match entry for an address, or None."""
        family, value = parse_address(address)
        return self._view.lpm(family, value)

    def covering(self, prefix: Prefix) -> list[RibEntry]:
        return self._view.covering(prefix)

    def covered(self, prefix: Prefix) -> list[RibEntry]:
        return self._view.covered(prefix)

    def export_lines(self) -> Iterator[str]:
        """Canonical dump: sorted announce event lines, byte-stable."""
        from .ingest.eventline import encode_event_line

        for entry in self.entries():
            event = UpdateEvent.announce(
                entry.last_changed_at // 1_000_000,
                entry.last_changed_at % 1_000_000,
                self.vp,
                self.peer_addr,
                self.peer_as,
                entry.prefix,
                entry.path,
            )
            yield encode_event_line(event)
