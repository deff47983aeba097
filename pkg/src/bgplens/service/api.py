"""Read-mostly HTTP API over a sealed store; operator console sits on top.

Everything serves from persisted WindowResults and alert records, so the
API can run against a finished replay or alongside a live one. The only
write path is alert acknowledgment, serialized inside the store.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..analysis import TOP_N_METRICS, path_metrics, top_n
from ..core import PrefixError, parse_prefix
from .config import Config
from .store import Store, StoreError, UnknownAlert

ACK_STATES = ("acknowledged", "dismissed")


class AckRequest(BaseModel):
    state: str
    note: Optional[str] = None


def _edge_endpoints(key: str) -> tuple[int, int]:
    a, _, b = key.partition("-")
    return int(a), int(b)


def _metric_values(payload: dict, metric: str) -> dict[int, float]:
    if metric == "transit_count":
        source = payload["rank"]["as_transit_count"]
    elif metric == "origin_prefix_count":
        source = payload["rank"]["origin_count"]
    elif metric == "path_change_count":
        source = payload["path_changes"]["per_as"]
    elif metric == "rank_change_frequency":
        return {
            int(asn): row["rank_change_frequency"]
            for asn, row in payload["stability"]["as"].items()
            if row["rank_change_frequency"] is not None
        }
    else:
        raise HTTPException(400, f"unknown metric {metric!r}; one of {TOP_N_METRICS}")
    return {int(asn): value for asn, value in source.items()}


def create_app(store: Store, config: Config | None = None) -> FastAPI:
    config = config if config is not None else Config()
    app = FastAPI(title="bgplens", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_params(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def require_token(request: Request) -> None:
        if config.api_token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {config.api_token}":
            raise HTTPException(401, "missing or invalid bearer token")

    guarded = [Depends(require_token)]

    @app.get("/api/v1/health")
    def health() -> dict:
        starts = store.window_starts()
        last = starts[-1] if starts else None
        interval = None
        if last is not None:
            interval = store.read_window(last)["window"]["interval"]
        return {
            "windows_sealed": len(starts),
            "last_sealed_window": last,
            "ingest_lag_seconds": (
                None if last is None else max(0, int(time.time()) - (last + interval))
            ),
            "alerts_open": store.open_alert_count(),
        }

    @app.get("/api/v1/alerts", dependencies=guarded)
    def alerts(
        state: Optional[str] = None,
        kind: Optional[str] = None,
        from_sec: Optional[int] = Query(default=None, alias="from"),
        to_sec: Optional[int] = Query(default=None, alias="to"),
    ) -> dict:
        return {"alerts": store.list_alerts(state, kind, from_sec, to_sec)}

    @app.post("/api/v1/alerts/{alert_id}/ack", dependencies=guarded)
    def ack_alert(alert_id: str, body: AckRequest) -> dict:
        if body.state not in ACK_STATES:
            raise HTTPException(400, f"state must be one of {ACK_STATES}")
        try:
            return store.update_alert_state(alert_id, body.state, body.note)
        except UnknownAlert:
            raise HTTPException(404, f"no alert {alert_id}") from None
        except StoreError as exc:
            raise HTTPException(409, str(exc)) from None

    @app.get("/api/v1/topn", dependencies=guarded)
    def topn(
        metric: str,
        n: int = 10,
        window: Optional[int] = None,
    ) -> dict:
        if n < 0:
            raise HTTPException(400, "n must be non-negative")
        starts = store.window_starts()
        if not starts:
            return {"window": None, "metric": metric, "entries": []}
        start = window if window is not None else starts[-1]
        if start not in starts:
            raise HTTPException(404, f"window {start} not sealed")
        payload = store.read_window(start)
        values = _metric_values(payload, metric)
        entries = [
            {"subject": subject, "value": value}
            for subject, value in top_n(values, n)
        ]
        return {"window": start, "metric": metric, "entries": entries}

    @app.get("/api/v1/as/{asn}", dependencies=guarded)
    def as_view(
        asn: int,
        from_sec: Optional[int] = Query(default=None, alias="from"),
        to_sec: Optional[int] = Query(default=None, alias="to"),
    ) -> dict:
        starts = store.windows_in_range(from_sec, to_sec)
        records = []
        adjacency: dict[int, int] = {}
        key = str(asn)
        for start in starts:
            payload = store.read_window(start)
            row = payload["stability"]["as"].get(key)
            if row is not None:
                records.append({"window_start": start, **row})
            for edge_key, count in payload["rank"]["edge_transit_count"].items():
                a, b = _edge_endpoints(edge_key)
                if asn == a:
                    adjacency[b] = count
                elif asn == b:
                    adjacency[a] = count
        if not records:
            raise HTTPException(404, f"AS{asn} not observed in range")
        neighbors = [
            {"neighbor": neighbor, "transit_count": count}
            for neighbor, count in sorted(
                adjacency.items(), key=lambda item: (-item[1], item[0])
            )
        ]
        return {"asn": asn, "records": records, "adjacency": neighbors}

    @app.get("/api/v1/path", dependencies=guarded)
    def path_compare(
        a: int,
        b: int,
        from_sec: Optional[int] = Query(default=None, alias="from"),
        to_sec: Optional[int] = Query(default=None, alias="to"),
    ) -> dict:
        if a == b:
            raise HTTPException(400, "a and b must differ")
        paths: set[tuple[int, ...]] = set()
        starts = store.windows_in_range(from_sec, to_sec)
        for start in starts:
            for path in store.read_window(start)["path_set"]:
                paths.add(tuple(path))
        period = (
            (starts[0], starts[-1] + store.read_window(starts[-1])["window"]["interval"])
            if starts
            else None
        )
        metrics = path_metrics(sorted(paths), a, b, period)
        return {
            "as_a": metrics.as_a,
            "as_b": metrics.as_b,
            "period": metrics.period,
            "path_count": metrics.path_count,
            "shortest_hops": metrics.shortest_hops,
            "longest_hops": metrics.longest_hops,
            "longest_unique_path_len": metrics.longest_unique_path_len,
            "unique_path_count": metrics.unique_path_count,
            "largest_prepend": metrics.largest_prepend,
            "prepend_range": metrics.prepend_range,
        }

    @app.get("/api/v1/prefix/{prefix:path}/timeline", dependencies=guarded)
    def prefix_timeline(
        prefix: str,
        from_sec: Optional[int] = Query(default=None, alias="from"),
        to_sec: Optional[int] = Query(default=None, alias="to"),
    ) -> dict:
        try:
            target = parse_prefix(prefix)
        except PrefixError as exc:
            raise HTTPException(400, str(exc)) from None
        key = str(target)
        starts = store.windows_in_range(from_sec, to_sec)
        windows = []
        seen = False
        events_by_window: dict[int, list[dict]] = {}
        if starts:
            interval = store.read_window(starts[0])["window"]["interval"]
            lo = starts[0]
            hi = starts[-1] + interval - 1
            for event in store.scan_events(lo, hi):
                if str(event.prefix) != key:
                    continue
                w = (event.ts_sec // interval) * interval
                events_by_window.setdefault(w, []).append(
                    {
                        "ts": f"{event.ts_sec}.{event.ts_usec:06d}",
                        "vp": event.vp,
                        "kind": event.kind.value,
                        "origin_as": event.origin_as,
                        "path": [asn for asn in event.path.iter_asns()]
                        if event.path
                        else None,
                    }
                )
        for start in starts:
            payload = store.read_window(start)
            origins = payload["prefix_origins"].get(key, [])
            events = events_by_window.get(start, [])
            if origins or events:
                seen = True
            windows.append(
                {"window_start": start, "origins": origins, "events": events}
            )
        if not seen:
            raise HTTPException(404, f"prefix {key} not observed in range")
        return {"prefix": key, "windows": windows}

    console_dir = config.console_dir
    if console_dir is not None and Path(console_dir).is_dir():
        app.mount(
            "/console",
            StaticFiles(directory=str(console_dir), html=True),
            name="console",
        )

    return app
