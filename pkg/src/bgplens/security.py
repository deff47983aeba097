"""Security anomaly detectors: bogon and unallocated space, prefix-length
anomalies, multi-origin conflicts (MOAS), rare prefixes and sub-prefix
injection.

Detection is announce-driven and immediate: each detector inspects one
event against shared cross-vantage-point state and returns an alert or
None. The SecurityMonitor owns that state, deduplicates repeated triggers
into a single alert record while the condition persists, and retires the
deduplication key one full window after the condition clears.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from .core import EventKind, Prefix, UpdateEvent, WindowId, parse_prefix
from .ingest.eventline import path_to_text
from .rib import DeltaAction, RibDelta
from .trie import PrefixMap

SHORT_PREFIX_MAX_MASK = 7    # /0../7 alert as too short
LONG_PREFIX_MIN_MASK = 25    # /25../32 alert as too long
DEFAULT_RARE_WINDOWS = 2016  # one week of 300 s windows


class AlertKind(Enum):
    SPECIAL_USE = "special_use"
    UNALLOCATED = "unallocated"
    SHORT_PREFIX = "short_prefix"
    LONG_PREFIX = "long_prefix"
    ORIGIN_CHANGE = "origin_change"
    RARE_PREFIX = "rare_prefix"
    SUBPREFIX_INJECTION = "subprefix_injection"


class AlertState(Enum):
    OPEN = "open"
    ACKNOWLEDGED = "acknowledged"
    DISMISSED = "dismissed"


@dataclass
class Alert:
    id: str
    kind: AlertKind
    prefix: Prefix
    window: WindowId
    first_event_us: int
    last_event_us: int
    implicated: tuple[int, ...]
    evidence: list[dict]
    state: AlertState = AlertState.OPEN
    note: str | None = None
    trigger_count: int = 1  # state-changing triggers; identical re-announces dedupe

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "prefix": str(self.prefix),
            "window": {"start": self.window.start, "interval": self.window.interval},
            "first_event_us": self.first_event_us,
            "last_event_us": self.last_event_us,
            "implicated": list(self.implicated),
            "evidence": self.evidence,
            "state": self.state.value,
            "note": self.note,
            "trigger_count": self.trigger_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Alert":
        return cls(
            id=data["id"],
            kind=AlertKind(data["kind"]),
            prefix=parse_prefix(data["prefix"]),
            window=WindowId(data["window"]["start"], data["window"]["interval"]),
            first_event_us=data["first_event_us"],
            last_event_us=data["last_event_us"],
            implicated=tuple(data["implicated"]),
            evidence=list(data["evidence"]),
            state=AlertState(data["state"]),
            note=data.get("note"),
            trigger_count=data.get("trigger_count", 1),
        )


def event_ref(event: UpdateEvent) -> dict:
    """Compact, JSON-friendly reference to a triggering event."""
    ref = {
        "ts": f"{event.ts_sec}.{event.ts_usec:06d}",
        "vp": event.vp,
        "peer_addr": event.peer_addr,
        "peer_as": event.peer_as,
        "kind": event.kind.value,
        "prefix": str(event.prefix),
    }
    if event.path is not None:
        ref["path"] = path_to_text(event.path)
    if event.origin_as is not None:
        ref["origin_as"] = event.origin_as
    return ref


def _evidence_key(item: dict) -> tuple:
    event = item.get("event")
    return (
        item.get("role"),
        item.get("prefix"),
        item.get("origin_as"),
        tuple(item.get("origins", ())),
        event["ts"] if event else None,
        event["vp"] if event else None,
    )


def _alert_id(
    kind: AlertKind, prefix: Prefix, first_event_us: int, first_evidence: dict
) -> str:
    seed = (
        f"{kind.value}|{prefix}|{first_event_us}"
        f"|{json.dumps(first_evidence, sort_keys=True)}"
    )
    return hashlib.sha256(seed.encode()).hexdigest()[:16]


def _make_alert(
    kind: AlertKind,
    event: UpdateEvent,
    window: WindowId,
    implicated: Iterable[int],
    evidence: list[dict],
) -> Alert:
    return Alert(
        id=_alert_id(kind, event.prefix, event.t_us, evidence[0]),
        kind=kind,
        prefix=event.prefix,
        window=window,
        first_event_us=event.t_us,
        last_event_us=event.t_us,
        implicated=tuple(sorted(set(implicated))),
        evidence=evidence,
    )


def parse_prefix_lines(text: str) -> tuple[Prefix, ...]:
    """Newline-delimited prefix list; '#' comments and blank lines ignored."""
    prefixes = []
    for line in text.splitlines():
        token = line.split("#", 1)[0].strip()
        if token:
            prefixes.append(parse_prefix(token))
    return tuple(prefixes)


def _load_prefix_file(path: Path) -> tuple[Prefix, ...]:
    return parse_prefix_lines(path.read_text())


def default_special_use() -> tuple[Prefix, ...]:
    """The packaged RFC 5735 IPv4 special-use list."""
    source = resources.files("bgplens").joinpath("data/special_use_v4.txt")
    return parse_prefix_lines(source.read_text())


class WatchList:
    """Configured prefix lists the detectors match against."""

    def __init__(
        self,
        special_use: Iterable[Prefix] | None = None,
        allocated: Iterable[Prefix] | None = None,
        rare_history_windows: int = DEFAULT_RARE_WINDOWS,
    ):
        self.special_use = (
            tuple(special_use) if special_use is not None else default_special_use()
        )
        self.allocated = tuple(allocated) if allocated is not None else None
        self.rare_history_windows = rare_history_windows
        self._special_trie = PrefixMap()
        for p in self.special_use:
            self._special_trie.set(p, p)
        self._allocated_trie: PrefixMap | None = None
        if self.allocated is not None:
            self._allocated_trie = PrefixMap()
            for p in self.allocated:
                self._allocated_trie.set(p, p)

    @classmethod
    def load(
        cls,
        special_use_file: Path | None = None,
        allocated_file: Path | None = None,
        rare_history_windows: int = DEFAULT_RARE_WINDOWS,
    ) -> "WatchList":
        special = (
            _load_prefix_file(special_use_file) if special_use_file else None
        )
        allocated = _load_prefix_file(allocated_file) if allocated_file else None
        return cls(special, allocated, rare_history_windows)

    def special_match(self, prefix: Prefix) -> Prefix | None:
        """A listed block this prefix equals, sits inside, or engulfs."""
        if prefix.family != 4:
            return None
        return self._special_trie.intersecting(prefix)

    def is_allocated(self, prefix: Prefix) -> bool | None:
        """True/False against the allocation table, None when not configured."""
        if self._allocated_trie is None:
            return None
        return self._allocated_trie.has_cover(prefix)


class _PrefixState:
    """Who currently announces one exact prefix, across every (vp, peer)."""

    __slots__ = ("prefix", "installs")

    def __init__(self, prefix: Prefix):
        self.prefix = prefix
        self.installs: dict[int | None, set[tuple[str, str, int]]] = {}

    def add(self, origin: int | None, rib_key: tuple[str, str, int]) -> None:
        self.installs.setdefault(origin, set()).add(rib_key)

    def remove(self, origin: int | None, rib_key: tuple[str, str, int]) -> None:
        holders = self.installs.get(origin)
        if holders is not None:
            holders.discard(rib_key)
            if not holders:
                del self.installs[origin]

    def resolved_origins(self) -> tuple[int, ...]:
        installs = self.installs
        if len(installs) == 1:
            for origin in installs:
                return (origin,) if origin is not None else ()
        return tuple(sorted(o for o in installs if o is not None))

    @property
    def empty(self) -> bool:
        return not self.installs


class GlobalView:
    """Cross-vantage-point installed state, indexed for containment queries."""

    def __init__(self):
        self._states = PrefixMap()

    def apply(self, event: UpdateEvent, delta: RibDelta) -> "_PrefixState | None":
        """Update from one delta; returns the prefix's state (None if gone)."""
        action = delta.action
        if action is DeltaAction.NOOP:
            return None
        prefix = delta.prefix
        if action is DeltaAction.REPLACED:
            old_origin = delta.old_path.origin
            state: _PrefixState | None = self._states.get(prefix)
            if old_origin == event.origin_as:
                return state  # same holder, same origin: nothing moves
            if state is not None:
                state.remove(old_origin, event.rib_key)
                state.add(event.origin_as, event.rib_key)
            return state
        if action is DeltaAction.INSTALLED:
            state = self._states.get(prefix)
            if state is None:
                state = _PrefixState(prefix)
                self._states.set(prefix, state)
            state.add(event.origin_as, event.rib_key)
            return state
        # REMOVED
        state = self._states.get(prefix)
        if state is not None:
            state.remove(delta.old_path.origin if delta.old_path else None, event.rib_key)
            if state.empty:
                self._states.delete(prefix)
                return None
        return state

    def get(self, prefix: Prefix) -> _PrefixState | None:
        return self._states.get(prefix)

    def covering(self, prefix: Prefix) -> list[_PrefixState]:
        return self._states.covering(prefix)

    def nearest_cover(self, prefix: Prefix) -> "_PrefixState | None":
        return self._states.covering_last(prefix)

    def installed(self, prefix: Prefix) -> bool:
        return prefix in self._states

    def states(self) -> Iterator[_PrefixState]:
        return self._states.values()

    def __len__(self) -> int:
        return len(self._states)


class RareHistory:
    """Which sealed windows each prefix was present in, compactly."""

    def __init__(self, history_windows: int):
        self.history_windows = history_windows
        self.sealed_count = 0
        self._last_present: dict[Prefix, int] = {}

    def note_sealed(self, installed: Iterable[Prefix]) -> None:
        self.sealed_count += 1
        for prefix in installed:
            self._last_present[prefix] = self.sealed_count

    def is_rare(self, prefix: Prefix) -> bool:
        """Absent from every one of the trailing H sealed windows."""
        if self.sealed_count < self.history_windows:
            return False  # warm-up: not enough history to judge
        last = self._last_present.get(prefix)
        return last is None or last <= self.sealed_count - self.history_windows


def _special_evidence(block: Prefix, event: UpdateEvent) -> list[dict]:
    return [
        {"role": "matched_block", "prefix": str(block)},
        {"role": "announcement", "event": event_ref(event)},
    ]


def _unallocated_evidence(event: UpdateEvent) -> list[dict]:
    return [{"role": "announcement", "event": event_ref(event)}]


def _length_evidence(event: UpdateEvent) -> list[dict]:
    return [
        {
            "role": "announcement",
            "mask_length": event.prefix.masklen,
            "event": event_ref(event),
        },
    ]


def _origin_change_evidence(origins: tuple[int, ...], event: UpdateEvent) -> list[dict]:
    evidence = [
        {"role": "existing_origin", "prefix": str(event.prefix), "origin_as": o}
        for o in origins
        if o != event.origin_as
    ]
    evidence.append(
        {
            "role": "new_origin",
            "prefix": str(event.prefix),
            "origin_as": event.origin_as,
            "event": event_ref(event),
        }
    )
    return evidence


def _subprefix_evidence(
    nearest: "_PrefixState", cover_origins: tuple[int, ...], event: UpdateEvent
) -> list[dict]:
    return [
        {
            "role": "covering",
            "prefix": str(nearest.prefix),
            "origins": list(cover_origins),
        },
        {
            "role": "injected",
            "prefix": str(event.prefix),
            "origin_as": event.origin_as,
            "event": event_ref(event),
        },
    ]


def _rare_evidence(history_windows: int, event: UpdateEvent) -> list[dict]:
    return [
        {
            "role": "announcement",
            "absent_windows": history_windows,
            "event": event_ref(event),
        },
    ]


def _subprefix_conflict(view: GlobalView, event: UpdateEvent):
    """Nearest covering state and its origins, when they conflict."""
    nearest = view.nearest_cover(event.prefix)
    if nearest is None:
        return None
    cover_origins = nearest.resolved_origins()
    # Same-origin more-specifics are traffic engineering, not injection; a
    # cover that is itself multi-origin still conflicts with the injection.
    if not any(origin != event.origin_as for origin in cover_origins):
        return None
    return nearest, cover_origins


def detect_special_use(
    event: UpdateEvent, watch: WatchList, window: WindowId
) -> Alert | None:
    block = watch.special_match(event.prefix)
    if block is None:
        return None
    implicated = [event.origin_as] if event.origin_as is not None else []
    return _make_alert(
        AlertKind.SPECIAL_USE, event, window, implicated, _special_evidence(block, event)
    )


def detect_unallocated(
    event: UpdateEvent, watch: WatchList, window: WindowId
) -> Alert | None:
    if watch.is_allocated(event.prefix) is not False:
        return None
    implicated = [event.origin_as] if event.origin_as is not None else []
    return _make_alert(
        AlertKind.UNALLOCATED, event, window, implicated, _unallocated_evidence(event)
    )


def detect_length_anomaly(event: UpdateEvent, window: WindowId) -> Alert | None:
    if event.prefix.family != 4:
        return None
    masklen = event.prefix.masklen
    if masklen <= SHORT_PREFIX_MAX_MASK:
        kind = AlertKind.SHORT_PREFIX
    elif masklen >= LONG_PREFIX_MIN_MASK:
        kind = AlertKind.LONG_PREFIX
    else:
        return None
    implicated = [event.origin_as] if event.origin_as is not None else []
    return _make_alert(kind, event, window, implicated, _length_evidence(event))


def detect_origin_change(
    view: GlobalView, event: UpdateEvent, window: WindowId
) -> Alert | None:
    if event.origin_as is None:
        return None
    state = view.get(event.prefix)
    if state is None:
        return None
    origins = state.resolved_origins()
    if len(origins) < 2:
        return None
    return _make_alert(
        AlertKind.ORIGIN_CHANGE, event, window, origins,
        _origin_change_evidence(origins, event),
    )


def detect_subprefix_injection(
    view: GlobalView, event: UpdateEvent, window: WindowId
) -> Alert | None:
    if event.origin_as is None:
        return None
    conflict = _subprefix_conflict(view, event)
    if conflict is None:
        return None
    nearest, cover_origins = conflict
    implicated = list(cover_origins) + [event.origin_as]
    return _make_alert(
        AlertKind.SUBPREFIX_INJECTION, event, window, implicated,
        _subprefix_evidence(nearest, cover_origins, event),
    )


def detect_rare_prefix(
    history: RareHistory, event: UpdateEvent, window: WindowId
) -> Alert | None:
    if not history.is_rare(event.prefix):
        return None
    implicated = [event.origin_as] if event.origin_as is not None else []
    return _make_alert(
        AlertKind.RARE_PREFIX, event, window, implicated,
        _rare_evidence(history.history_windows, event),
    )


class SecurityMonitor:
    """Runs every detector over the event stream with dedup and lifecycle.

    Owned by the single window-sequencer task; one alert record stays live
    while its condition persists and is retired one full window after the
    condition clears, at which point a recurrence mints a fresh id.
    """

    def __init__(self, watch: WatchList | None = None, ipv6_detectors: bool = False):
        self.watch = watch if watch is not None else WatchList()
        self.ipv6_detectors = ipv6_detectors
        self.view = GlobalView()
        self.rare = RareHistory(self.watch.rare_history_windows)
        self._check_allocated = self.watch.allocated is not None
        self._active: dict[tuple[AlertKind, Prefix], Alert] = {}
        self._cleared_at: dict[tuple[AlertKind, Prefix], int] = {}
        self._dirty: dict[str, Alert] = {}

    def observe(self, event: UpdateEvent, delta: RibDelta, window: WindowId) -> None:
        action = delta.action
        # An announce that moves no origin anywhere cannot change any
        # exact-prefix condition: whatever holds now held at the last event
        # on this prefix, so its alert is already live and deduplicating.
        # Only containment against OTHER prefixes can have changed, so the
        # sub-prefix check still runs.
        if action is DeltaAction.NOOP:
            if event.kind is not EventKind.ANNOUNCE:
                return
            fast = True
        elif (
            action is DeltaAction.REPLACED
            and delta.old_path.origin == event.origin_as
        ):
            fast = True  # same holder, same origin: global view unchanged
        else:
            fast = False
            state = self.view.apply(event, delta)
            if event.kind is not EventKind.ANNOUNCE:
                return
        prefix = event.prefix
        if prefix.family == 6 and not self.ipv6_detectors:
            return
        origin = event.origin_as
        if fast:
            if origin is None:
                return
            conflict = _subprefix_conflict(self.view, event)
            if conflict is not None:
                nearest, cover_origins = conflict
                self._fire(
                    AlertKind.SUBPREFIX_INJECTION, event, window,
                    tuple(cover_origins) + (origin,),
                    lambda: _subprefix_evidence(nearest, cover_origins, event),
                )
            return
        single = (origin,) if origin is not None else ()

        block = self.watch.special_match(prefix)
        if block is not None:
            self._fire(
                AlertKind.SPECIAL_USE, event, window, single,
                lambda: _special_evidence(block, event),
            )
        if self._check_allocated and not self.watch.is_allocated(prefix):
            self._fire(
                AlertKind.UNALLOCATED, event, window, single,
                lambda: _unallocated_evidence(event),
            )
        if prefix.family == 4:
            masklen = prefix.masklen
            if masklen <= SHORT_PREFIX_MAX_MASK:
                self._fire(
                    AlertKind.SHORT_PREFIX, event, window, single,
                    lambda: _length_evidence(event),
                )
            elif masklen >= LONG_PREFIX_MIN_MASK:
                self._fire(
                    AlertKind.LONG_PREFIX, event, window, single,
                    lambda: _length_evidence(event),
                )
        if origin is None:
            return
        if state is not None and len(state.installs) > 1:
            origins = state.resolved_origins()
            if len(origins) >= 2:
                self._fire(
                    AlertKind.ORIGIN_CHANGE, event, window, origins,
                    lambda: _origin_change_evidence(origins, event),
                )
        conflict = _subprefix_conflict(self.view, event)
        if conflict is not None:
            nearest, cover_origins = conflict
            self._fire(
                AlertKind.SUBPREFIX_INJECTION, event, window,
                tuple(cover_origins) + (origin,),
                lambda: _subprefix_evidence(nearest, cover_origins, event),
            )
        if self.rare.is_rare(prefix):
            self._fire(
                AlertKind.RARE_PREFIX, event, window, single,
                lambda: _rare_evidence(self.rare.history_windows, event),
            )

    def _fire(
        self,
        kind: AlertKind,
        event: UpdateEvent,
        window: WindowId,
        implicated: tuple[int, ...],
        build_evidence,
    ) -> None:
        key = (kind, event.prefix)
        active = self._active.get(key)
        if active is None:
            fresh = _make_alert(kind, event, window, implicated, build_evidence())
            self._active[key] = fresh
            self._cleared_at.pop(key, None)
            self._dirty[fresh.id] = fresh
            return
        active.last_event_us = event.t_us
        active.trigger_count += 1
        merged = tuple(sorted(set(active.implicated) | set(implicated)))
        if merged != active.implicated:
            active.implicated = merged
            seen = {_evidence_key(item) for item in active.evidence}
            for item in build_evidence():
                if _evidence_key(item) not in seen:
                    active.evidence.append(item)
        self._dirty[active.id] = active

    def _condition_holds(self, alert: Alert) -> bool:
        prefix = alert.prefix
        if alert.kind is AlertKind.ORIGIN_CHANGE:
            state = self.view.get(prefix)
            return state is not None and len(state.resolved_origins()) >= 2
        if alert.kind is AlertKind.SUBPREFIX_INJECTION:
            state = self.view.get(prefix)
            if state is None:
                return False
            nearest = self.view.nearest_cover(prefix)
            if nearest is None:
                return False
            cover_origins = nearest.resolved_origins()
            return any(
                c != o
                for o in state.resolved_origins()
                for c in cover_origins
            )
        # Presence-style conditions: the prefix is still installed somewhere.
        return self.view.installed(prefix)

    def seal_window(self, window: WindowId, installed=None) -> list[Alert]:
        """Advance lifecycle state and return alerts touched this window.

        ``installed`` can pass in the currently installed prefixes when the
        caller has already walked the global view this window.
        """
        if installed is None:
            installed = (state.prefix for state in self.view.states())
        self.rare.note_sealed(installed)
        for key, alert in list(self._active.items()):
            if self._condition_holds(alert):
                self._cleared_at.pop(key, None)
            elif key in self._cleared_at:
                if window.start > self._cleared_at[key]:
                    del self._active[key]
                    del self._cleared_at[key]
            else:
                self._cleared_at[key] = window.start
        dirty = sorted(self._dirty.values(), key=lambda a: (a.first_event_us, a.id))
        self._dirty = {}
        return dirty
