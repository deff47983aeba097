"""File-backed store: append-only event log plus sealed window results.

Layout under the store root:

    events/<vp>/<YYYYMMDDHH>.log   raw event lines, per hour per vantage point
    windows/<start>.json           one canonical-JSON WindowResult per window
    alerts/<id>.json               alert records (the only mutable files)
    alerts/index.json              alert id -> {state, kind, window_start, ...}

Window files are written once and never touched again; their bytes are a
pure function of the input stream and configuration. All JSON is dumped
with sorted keys and fixed separators so exports are byte-stable.
"""

from __future__ import annotations

import json
import os
import re
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterator

from ..core import UpdateEvent
from ..ingest.eventline import encode_event_line, parse_event_line


class StoreError(RuntimeError):
    pass


class UnknownAlert(KeyError):
    pass


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


_SAFE_SEGMENT = re.compile(r"[^A-Za-z0-9._-]")


def _safe_segment(name: str) -> str:
    return _SAFE_SEGMENT.sub("_", name) or "_"


def _hour_key(ts_sec: int) -> str:
    stamp = datetime.fromtimestamp(ts_sec, tz=timezone.utc)
    return stamp.strftime("%Y%m%d%H")


class Store:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        (self.root / "events").mkdir(parents=True, exist_ok=True)
        (self.root / "windows").mkdir(exist_ok=True)
        (self.root / "alerts").mkdir(exist_ok=True)
        self._log_handles: dict[Path, IO[str]] = {}
        self._alert_lock = threading.Lock()
        self._alert_index: dict | None = None  # in-memory mirror of index.json

    # -- event log ---------------------------------------------------------

    def append_event(self, event: UpdateEvent) -> None:
        path = (
            self.root
            / "events"
            / _safe_segment(event.vp)
            / f"{_hour_key(event.ts_sec)}.log"
        )
        handle = self._log_handles.get(path)
        if handle is None:
            path.parent.mkdir(exist_ok=True)
            handle = path.open("a", encoding="utf-8")
            self._log_handles[path] = handle
        handle.write(encode_event_line(event))
        handle.write("\n")

    def event_log_files(self) -> list[Path]:
        return sorted((self.root / "events").glob("*/*.log"))

    def scan_events(
        self, from_sec: int | None = None, to_sec: int | None = None
    ) -> Iterator[UpdateEvent]:
        """Replay logged events, filtered to [from_sec, to_sec] inclusive.

        Hour segmentation bounds the scan to files that can overlap the range.
        """
        self.flush()
        lo_key = _hour_key(from_sec) if from_sec is not None else None
        hi_key = _hour_key(to_sec) if to_sec is not None else None
        for path in self.event_log_files():
            hour = path.stem
            if lo_key is not None and hour < lo_key:
                continue
            if hi_key is not None and hour > hi_key:
                continue
            with path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    event = parse_event_line(line)
                    if from_sec is not None and event.ts_sec < from_sec:
                        continue
                    if to_sec is not None and event.ts_sec > to_sec:
                        continue
                    yield event

    def flush(self) -> None:
        for handle in self._log_handles.values():
            handle.flush()

    def close(self) -> None:
        for handle in self._log_handles.values():
            handle.close()
        self._log_handles = {}

    # -- window results ------------------------------------------------------

    def _window_path(self, start: int) -> Path:
        return self.root / "windows" / f"{start}.json"

    def write_window(self, start: int, payload: dict) -> None:
        path = self._window_path(start)
        if path.exists():
            raise StoreError(f"window {start} already sealed")
        self._atomic_write(path, canonical_json(payload) + "\n")

    def has_window(self, start: int) -> bool:
        return self._window_path(start).exists()

    def read_window(self, start: int) -> dict:
        try:
            return json.loads(self._window_path(start).read_text())
        except FileNotFoundError as exc:
            raise StoreError(f"window {start} not sealed") from exc

    def window_starts(self) -> list[int]:
        return sorted(
            int(p.stem) for p in (self.root / "windows").glob("*.json")
        )

    def windows_in_range(
        self, from_sec: int | None = None, to_sec: int | None = None
    ) -> list[int]:
        return [
            s
            for s in self.window_starts()
            if (from_sec is None or s >= from_sec)
            and (to_sec is None or s <= to_sec)
        ]

    def export_windows(
        self, from_sec: int | None = None, to_sec: int | None = None
    ) -> Iterator[bytes]:
        """Sealed window files, verbatim, in window order."""
        for start in self.windows_in_range(from_sec, to_sec):
            yield self._window_path(start).read_bytes()

    # -- alerts --------------------------------------------------------------

    def _alert_path(self, alert_id: str) -> Path:
        return self.root / "alerts" / f"{_safe_segment(alert_id)}.json"

    def _index_path(self) -> Path:
        return self.root / "alerts" / "index.json"

    def _read_index(self) -> dict:
        if self._alert_index is None:
            try:
                self._alert_index = json.loads(self._index_path().read_text())
            except FileNotFoundError:
                self._alert_index = {}
        return self._alert_index

    def _write_alerts_locked(self, alerts: list[dict]) -> None:
        index = self._read_index()
        for alert in alerts:
            self._atomic_write(
                self._alert_path(alert["id"]), canonical_json(alert) + "\n"
            )
            index[alert["id"]] = {
                "state": alert["state"],
                "kind": alert["kind"],
                "window_start": alert["window"]["start"],
                "first_event_us": alert["first_event_us"],
            }
        self._atomic_write(self._index_path(), canonical_json(index) + "\n")

    def write_alert(self, alert: dict) -> None:
        """Insert or replace one alert record and its index row."""
        with self._alert_lock:
            self._write_alerts_locked([alert])

    def write_alerts(self, alerts: list[dict]) -> None:
        """Batch insert/replace; the index is persisted once at the end."""
        if not alerts:
            return
        with self._alert_lock:
            self._write_alerts_locked(alerts)

    def read_alert(self, alert_id: str) -> dict:
        try:
            return json.loads(self._alert_path(alert_id).read_text())
        except FileNotFoundError as exc:
            raise UnknownAlert(alert_id) from exc

    def update_alert_state(self, alert_id: str, state: str, note: str | None) -> dict:
        """Apply an operator acknowledgment; Open -> Acknowledged|Dismissed only."""
        with self._alert_lock:
            alert = self.read_alert(alert_id)
            if alert["state"] != "open":
                raise StoreError(f"alert {alert_id} is {alert['state']}, not open")
            alert["state"] = state
            if note is not None:
                alert["note"] = note
            self._write_alerts_locked([alert])
        return alert

    def list_alerts(
        self,
        state: str | None = None,
        kind: str | None = None,
        from_sec: int | None = None,
        to_sec: int | None = None,
    ) -> list[dict]:
        """Matching alert records, newest first."""
        index = self._read_index()
        matches = []
        for alert_id, row in index.items():
            if state is not None and row["state"] != state:
                continue
            if kind is not None and row["kind"] != kind:
                continue
            if from_sec is not None and row["first_event_us"] < from_sec * 1_000_000:
                continue
            if to_sec is not None and row["first_event_us"] > to_sec * 1_000_000:
                continue
            matches.append((row["first_event_us"], alert_id))
        matches.sort(key=lambda item: (-item[0], item[1]))
        return [self.read_alert(alert_id) for _, alert_id in matches]

    def open_alert_count(self) -> int:
        return sum(1 for row in self._read_index().values() if row["state"] == "open")

    # -- internals -------------------------------------------------------------

    def _atomic_write(self, path: Path, text: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
