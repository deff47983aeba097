#!/usr/bin/env python3
"""Record API responses from the hijack corpus into tests/fixtures/.

Run from the repository root with the package installed:

    python3 frontend/scripts/make_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from fastapi.testclient import TestClient

from bgplens.service.api import create_app
from bgplens.service.config import Config
from bgplens.service.pipeline import Pipeline
from bgplens.service.store import Store
from corpus import HIJACK_PREFIX, HIJACK_SUBPREFIX, LEGIT_ORIGIN, hijack_events

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        store = Store(Path(tmp) / "store")
        pipeline = Pipeline(Config(window_interval=300, allowed_skew=60), store)
        pipeline.feed_all(hijack_events())
        pipeline.finish()
        client = TestClient(create_app(store, Config()))

        captures = {
            "alerts.json": client.get("/api/v1/alerts").json(),
            "topn_transit.json": client.get(
                "/api/v1/topn", params={"metric": "transit_count", "n": 10}
            ).json(),
            "as_view.json": client.get(f"/api/v1/as/{LEGIT_ORIGIN}").json(),
            "path_compare.json": client.get(
                "/api/v1/path", params={"a": 64601, "b": LEGIT_ORIGIN}
            ).json(),
            "timeline_injected.json": client.get(
                f"/api/v1/prefix/{HIJACK_SUBPREFIX}/timeline"
            ).json(),
            "timeline_covering.json": client.get(
                f"/api/v1/prefix/{HIJACK_PREFIX}/timeline"
            ).json(),
            "health.json": client.get("/api/v1/health").json(),
        }
        for name, payload in captures.items():
            (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            print(f"wrote {name}")


if __name__ == "__main__":
    main()
