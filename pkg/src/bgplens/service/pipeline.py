"""Window sequencer: buffers events, seals windows behind a watermark,
drives the RIBs, features and detectors, and persists WindowResults.

A window W seals once the maximum observed event time reaches
W.end + allowed_skew. Out-of-order events inside the skew land in their
proper (still unsealed) window; anything later is counted and dropped,
never applied retroactively, so a sealed window can never change. Sealed
windows are gap-free between the first and last event of a run.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable

from ..analysis import (
    PathChangeCounts,
    RankSnapshot,
    path_change_counts,
    rank_change_frequency,
    rank_delta,
    rank_from_prefix_paths,
)
from ..core import AsPath, UpdateEvent, WindowId, window_of
from ..rib import Rib, RibDelta
from ..security import Alert, SecurityMonitor, WatchList
from .config import Config
from .store import Store


@dataclass
class RunSummary:
    windows_sealed: int = 0
    events_read: int = 0
    events_applied: int = 0
    events_late: int = 0
    events_malformed: int = 0
    events_unsupported: int = 0
    alerts_raised: int = 0
    elapsed_s: float = 0.0

    def to_dict(self) -> dict:
        events_per_s = (
            round(self.events_applied / self.elapsed_s, 1) if self.elapsed_s else None
        )
        return {
            "windows_sealed": self.windows_sealed,
            "events": {
                "read": self.events_read,
                "applied": self.events_applied,
                "late_skipped": self.events_late,
                "malformed_skipped": self.events_malformed,
                "unsupported_skipped": self.events_unsupported,
            },
            "alerts_raised": self.alerts_raised,
            "elapsed_s": round(self.elapsed_s, 3),
            "events_per_s": events_per_s,
        }


_EDGE_STR: dict[tuple[int, int], str] = {}


def _edge_key(edge: tuple[int, int]) -> str:
    key = _EDGE_STR.get(edge)
    if key is None:
        key = _EDGE_STR[edge] = f"{edge[0]}-{edge[1]}"
    return key


_FLAT_PATH: dict[AsPath, tuple[int, ...] | None] = {}


def _flat_path(path: AsPath) -> tuple[int, ...] | None:
    """Flattened pure-sequence path, None for paths with set segments."""
    flat = _FLAT_PATH.get(path, False)
    if flat is False:
        flat = None if path.has_set else path.flatten_sequences()
        _FLAT_PATH[path] = flat
    return flat


class Pipeline:
    """Single-writer sequencer; feed() events in arrival order, then finish()."""

    def __init__(
        self,
        config: Config | None = None,
        store: Store | None = None,
        watch: WatchList | None = None,
    ):
        self.config = config if config is not None else Config()
        self.store = store
        if watch is None:
            watch = WatchList.load(
                self.config.special_use_file,
                self.config.allocated_file,
                self.config.rare_history_windows,
            )
        self.monitor = SecurityMonitor(watch, self.config.ipv6_detectors)
        self.interval = self.config.window_interval
        self.ribs: dict[tuple[str, str, int], Rib] = {}
        self.summary = RunSummary()
        self._log_fn = (
            store.append_event if store is not None and self.config.log_events else None
        )
        self._pending: dict[int, list[tuple[int, int, UpdateEvent]]] = {}
        self._next_start: int | None = None
        self._max_ts: int | None = None
        self._seq = 0
        self._late_since_seal = 0
        self._prev_rank: RankSnapshot | None = None
        self._rank_history: deque[tuple[dict, dict]] = deque(
            maxlen=self.config.rank_freq_windows
        )
        self._known_alerts: set[str] = set()
        self.results: list[dict] = []  # kept only when there is no store

    # -- ingestion ----------------------------------------------------------

    def feed(self, event: UpdateEvent) -> None:
        self.summary.events_read += 1
        if self._log_fn is not None:
            self._log_fn(event)
        start = (event.ts_sec // self.interval) * self.interval
        if self._next_start is not None and start < self._next_start:
            self.summary.events_late += 1
            self._late_since_seal += 1
            return
        bucket = self._pending.get(start)
        if bucket is None:
            bucket = self._pending[start] = []
        bucket.append(
            (event.ts_sec * 1_000_000 + event.ts_usec, self._seq, event)
        )
        self._seq += 1
        if self._max_ts is None or event.ts_sec > self._max_ts:
            self._max_ts = event.ts_sec
            if self._next_start is None:
                self._next_start = start
            self._advance()

    def feed_all(self, events: Iterable[UpdateEvent]) -> None:
        for event in events:
            self.feed(event)

    def _advance(self) -> None:
        # Seal every window whose watermark has passed, oldest first.
        horizon = self._max_ts - self.interval - self.config.allowed_skew
        while self._next_start is not None and self._next_start <= horizon:
            self._seal(WindowId(self._next_start, self.interval))
            self._next_start += self.interval

    def finish(self) -> RunSummary:
        """Seal every remaining window through the last event's window."""
        if self._max_ts is not None and self._next_start is not None:
            last = (self._max_ts // self.interval) * self.interval
            while self._next_start <= last:
                self._seal(WindowId(self._next_start, self.interval))
                self._next_start += self.interval
        if self.store is not None:
            self.store.flush()
        return self.summary

    # -- sealing ------------------------------------------------------------

    def _seal(self, window: WindowId) -> None:
        batch = self._pending.pop(window.start, None) or []
        batch.sort()  # (t_us, seq, event); seq is unique, events never compared

        deltas: list[RibDelta] = []
        vps: list[str] = []
        ribs = self.ribs
        observe = self.monitor.observe
        append_delta = deltas.append
        append_vp = vps.append
        for _, _, event in batch:
            key = event.rib_key
            rib = ribs.get(key)
            if rib is None:
                rib = ribs[key] = Rib(*key)
            delta = rib.apply_event(event)
            observe(event, delta, window)
            append_delta(delta)
            append_vp(event.vp)
        per_vp = dict(Counter(vps))
        self.summary.events_applied += len(batch)

        # One pass over the window-end state feeds ranking and path history.
        # No events apply between seals, so the live tables ARE the boundary.
        per_prefix_paths: dict = {}
        path_set: set[tuple[int, ...]] = set()
        for rib_key in sorted(ribs):
            for entry in ribs[rib_key].entries():
                bucket = per_prefix_paths.get(entry.prefix)
                if bucket is None:
                    bucket = per_prefix_paths[entry.prefix] = set()
                bucket.add(entry.path)
        for paths in per_prefix_paths.values():
            for path in paths:
                flat = _flat_path(path)
                if flat is not None:
                    path_set.add(flat)
        for delta in deltas:
            if delta.old_path is not None:
                flat = _flat_path(delta.old_path)
                if flat is not None:
                    path_set.add(flat)
            if delta.new_path is not None:
                flat = _flat_path(delta.new_path)
                if flat is not None:
                    path_set.add(flat)

        rank = rank_from_prefix_paths(window, per_prefix_paths)
        changes = path_change_counts(deltas)
        if self._prev_rank is not None:
            as_changes, edge_changes = rank_delta(self._prev_rank, rank)
        else:
            as_changes, edge_changes = {}, {}
        self._rank_history.append((rank.as_rank, rank.edge_rank))

        installed: list = []
        prefix_origins: dict[str, list[int]] = {}
        for state in self.monitor.view.states():
            installed.append(state.prefix)
            prefix_origins[str(state.prefix)] = list(state.resolved_origins())
        alerts = self.monitor.seal_window(window, installed)

        payload = self._build_payload(
            window, rank, changes, as_changes, edge_changes, alerts, per_vp,
            path_set, prefix_origins,
        )
        if self.store is not None:
            self.store.write_window(window.start, payload)
            self.store.write_alerts([alert.to_dict() for alert in alerts])
        else:
            self.results.append(payload)

        for alert in alerts:
            if alert.id not in self._known_alerts:
                self._known_alerts.add(alert.id)
                self.summary.alerts_raised += 1
        self._prev_rank = rank
        self.summary.windows_sealed += 1
        self._late_since_seal = 0

    def _frequency(self, subject, which: int) -> float | None:
        ranks = [maps[which].get(subject) for maps in self._rank_history]
        return rank_change_frequency(ranks)

    def _build_payload(
        self,
        window: WindowId,
        rank: RankSnapshot,
        changes: PathChangeCounts,
        as_changes: dict,
        edge_changes: dict,
        alerts: list[Alert],
        per_vp: dict[str, int],
        path_set: set[tuple[int, ...]],
        prefix_origins: dict[str, list[int]],
    ) -> dict:
        as_stability = {
            str(asn): {
                "path_change_count": changes.per_as.get(asn, 0),
                "rank": ordinal,
                "rank_change": as_changes.get(asn),
                "rank_change_frequency": self._frequency(asn, 0),
            }
            for asn, ordinal in rank.as_rank.items()
        }
        edge_stability = {
            _edge_key(edge): {
                "path_change_count": changes.per_edge.get(edge, 0),
                "rank": ordinal,
                "rank_change": edge_changes.get(edge),
                "rank_change_frequency": self._frequency(edge, 1),
            }
            for edge, ordinal in rank.edge_rank.items()
        }

        return {
            "window": {"start": window.start, "interval": window.interval},
            "rank": {
                "as_transit_count": {str(k): v for k, v in rank.as_transit_count.items()},
                "as_rank": {str(k): v for k, v in rank.as_rank.items()},
                "origin_count": {str(k): v for k, v in rank.origin_count.items()},
                "edge_transit_count": {
                    _edge_key(k): v for k, v in rank.edge_transit_count.items()
                },
                "edge_rank": {_edge_key(k): v for k, v in rank.edge_rank.items()},
            },
            "path_changes": {
                "per_prefix": {str(k): v for k, v in changes.per_prefix.items()},
                "per_as": {str(k): v for k, v in changes.per_as.items()},
                "per_edge": {_edge_key(k): v for k, v in changes.per_edge.items()},
            },
            "stability": {"as": as_stability, "edge": edge_stability},
            "alerts": sorted(alert.id for alert in alerts),
            "ingest_stats": {
                "events_applied": sum(per_vp.values()),
                "events_late": self._late_since_seal,
                "per_vp": per_vp,
            },
            "path_set": sorted(path_set),
            "prefix_origins": prefix_origins,
        }
