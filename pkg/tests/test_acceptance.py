"""Acceptance suite: one test per release criterion, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is pinned here; no criterion defers to later tuning.
"""

import io
import random
import resource
import time

import mrt_wire
from bgplens.analysis import compute_rank_snapshot, path_change_counts, rank_change_frequency
from bgplens.core import (
    AsPath,
    EventKind,
    Prefix,
    UpdateEvent,
    WindowId,
    format_address,
    parse_prefix,
)
from bgplens.ingest.eventline import encode_event_line
from bgplens.ingest.mrt import DecodeStats, decode_stream
from bgplens.rib import Rib
from bgplens.security import SecurityMonitor, WatchList, default_special_use, detect_length_anomaly, detect_special_use
from bgplens.service.config import Config
from bgplens.service.pipeline import Pipeline
from bgplens.service.replay import run_replay
from bgplens.service.store import Store
from corpus import (
    ATTACK_TS,
    ATTACKER_ORIGIN,
    HIJACK_PREFIX,
    HIJACK_SUBPREFIX,
    LEGIT_ORIGIN,
    VPS,
    hijack_events,
    random_events,
    random_prefixes,
    realistic_stream,
)
from test_mrt import build_corpus
from test_rib import FlatOracle


def ok(number: int, name: str) -> None:
    print(f"\nACCEPTANCE {number} ({name}): PASS")


def test_criterion_1_hijack_scenario(tmp_path):
    started = time.perf_counter()
    store = Store(tmp_path / "store")
    pipeline = Pipeline(Config(window_interval=300, allowed_skew=60), store)
    pipeline.feed_all(hijack_events())
    pipeline.finish()

    alerts = store.list_alerts()
    assert len(alerts) == 2, f"expected exactly 2 alerts, got {len(alerts)}"
    by_kind = {a["kind"]: a for a in alerts}
    assert set(by_kind) == {"origin_change", "subprefix_injection"}

    moas = by_kind["origin_change"]
    assert moas["prefix"] == HIJACK_PREFIX
    assert moas["first_event_us"] == ATTACK_TS * 1_000_000
    assert moas["implicated"] == sorted([LEGIT_ORIGIN, ATTACKER_ORIGIN])

    injection = by_kind["subprefix_injection"]
    assert injection["prefix"] == HIJACK_SUBPREFIX
    assert injection["first_event_us"] == (ATTACK_TS + 10) * 1_000_000
    assert injection["evidence"][0]["role"] == "covering"
    assert injection["evidence"][0]["prefix"] == HIJACK_PREFIX

    attack_window = (ATTACK_TS // 300) * 300
    for start in store.window_starts():
        payload = store.read_window(start)
        if start < attack_window:
            assert payload["alerts"] == [], f"alert before the attack in window {start}"

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"hijack scenario took {elapsed:.2f}s (limit 1 s)"
    ok(1, "hijack scenario fixture")


def test_criterion_2_rib_oracle_equivalence():
    started = time.perf_counter()
    rng = random.Random(20_2)
    prefixes = random_prefixes(rng, 500)
    vp = VPS[0]
    events = random_events(rng, 10_000, prefixes, vps=[vp])

    rib = Rib(*vp)
    oracle = FlatOracle()
    for event in events:
        rib.apply_event(event)
        oracle.apply(event)
    snap = rib.snapshot()

    assert {(e.prefix, e.path) for e in snap.entries()} == set(oracle.entries.items())

    for _ in range(1_000):
        address = rng.getrandbits(32)
        got = snap.lookup_lpm(format_address(4, address))
        assert (got.prefix if got else None) == oracle.lpm(4, address)

    probes = prefixes[:100] + random_prefixes(rng, 50)
    for probe in probes:
        assert [e.prefix for e in snap.covering(probe)] == oracle.covering(probe)
        assert [e.prefix for e in snap.covered(probe)] == oracle.covered(probe)

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"RIB oracle run took {elapsed:.2f}s (limit 10 s)"
    ok(2, "RIB trie vs flat-map oracle")


def brute_force_rank(snapshots):
    """Nested-loop recount: membership tested per AS per prefix."""
    prefix_paths = {}
    for snap in snapshots:
        for entry in snap.entries():
            prefix_paths.setdefault(entry.prefix, set()).add(entry.path)
    members = {}
    edges = {}
    for paths in prefix_paths.values():
        for path in paths:
            if path not in members:
                members[path] = set(path.iter_asns())
                edges[path] = brute_force_edges(path)
    all_asns = set().union(*members.values()) if members else set()
    as_count = {}
    for asn in all_asns:
        total = 0
        for paths in prefix_paths.values():
            if any(asn in members[p] for p in paths):
                total += 1
        if total:
            as_count[asn] = total
    all_edges = set().union(*edges.values()) if edges else set()
    edge_count = {}
    for edge in all_edges:
        total = 0
        for paths in prefix_paths.values():
            if any(edge in edges[p] for p in paths):
                total += 1
        if total:
            edge_count[edge] = total
    return as_count, edge_count


def brute_force_edges(path):
    edges = set()
    for run in path.sequence_runs():
        collapsed = []
        for asn in run:
            if not collapsed or collapsed[-1] != asn:
                collapsed.append(asn)
        for i in range(len(collapsed) - 1):
            a, b = collapsed[i], collapsed[i + 1]
            edges.add((min(a, b), max(a, b)))
    return edges


def test_criterion_3_rank_oracle():
    rng = random.Random(30_3)
    prefixes = random_prefixes(rng, 800)
    interval = 60
    start_ts = 1_599_999_960  # aligned: spans exactly 20 windows
    assert start_ts % interval == 0
    events = random_events(
        rng, 8_000, prefixes, start_ts=start_ts, duration=20 * interval - 1
    )

    batches = {}
    for i, event in enumerate(events):
        start = (event.ts_sec // interval) * interval
        batches.setdefault(start, []).append((event.t_us, i, event))

    ribs = {}
    windows_checked = 0
    for start in sorted(batches):
        window = WindowId(start, interval)
        deltas = []
        for _, _, event in sorted(batches[start]):
            rib = ribs.setdefault(event.rib_key, Rib(*event.rib_key))
            deltas.append(rib.apply_event(event))
        snapshots = [ribs[k].snapshot() for k in sorted(ribs)]

        rank = compute_rank_snapshot(window, snapshots)
        expected_as, expected_edge = brute_force_rank(snapshots)
        assert dict(rank.as_transit_count) == expected_as
        assert dict(rank.edge_transit_count) == expected_edge
        # ordinals: a permutation of 1..N, descending count, AS tie-break
        ordered = sorted(expected_as.items(), key=lambda kv: (-kv[1], kv[0]))
        assert [rank.as_rank[asn] for asn, _ in ordered] == list(
            range(1, len(ordered) + 1)
        )

        counts = path_change_counts(deltas)
        changed = [d for d in deltas if d.path_changed]
        per_prefix = {}
        for delta in changed:
            per_prefix[delta.prefix] = per_prefix.get(delta.prefix, 0) + 1
        assert dict(counts.per_prefix) == per_prefix
        delta_members = [
            {
                asn
                for path in (d.old_path, d.new_path)
                if path is not None
                for asn in path.iter_asns()
            }
            for d in changed
        ]
        touched = set().union(*delta_members) if delta_members else set()
        for asn in touched:
            expected = sum(1 for m in delta_members if asn in m)
            assert counts.per_as[asn] == expected
        windows_checked += 1
    assert windows_checked == 20

    # rank-change frequency against hand-computed transition counts
    assert rank_change_frequency([4, 4, 4, 4]) == 0.0
    assert rank_change_frequency([1, 2, 1, 2]) == 1.0
    assert rank_change_frequency([3, 3, 5, 5, 2]) == 2 / 4
    series = [rng.randint(1, 5) for _ in range(50)]
    hand = sum(1 for a, b in zip(series, series[1:]) if a != b)
    assert rank_change_frequency(series) == hand / 49
    ok(3, "rank + path-change brute-force oracle, 20 windows")


def test_criterion_4_mrt_round_trip_and_fuzz():
    rng = random.Random(40_4)
    blob, expected = build_corpus(rng, 1000)
    stats = DecodeStats()
    events = list(decode_stream(io.BytesIO(blob), "rv", stats))
    assert stats.records == 1000
    assert stats.malformed == 0 and stats.unsupported == 0

    i = 0
    from bgplens.core import Segment, SegmentKind

    for exp in expected:
        want_path = AsPath(
            tuple(
                Segment(
                    SegmentKind.SEQUENCE if k == mrt_wire.AS_SEQUENCE else SegmentKind.SET,
                    tuple(asns),
                )
                for k, asns in exp["segments"]
            )
        )
        for text in exp["withdrawn"]:
            event = events[i]; i += 1
            assert event.kind is EventKind.WITHDRAW
            assert str(event.prefix) == text
            assert (event.ts_sec, event.ts_usec) == exp["ts"]
        for text in exp["nlri"]:
            event = events[i]; i += 1
            assert event.kind is EventKind.ANNOUNCE
            assert str(event.prefix) == text
            assert event.path == want_path
            assert event.origin_as == want_path.origin
            assert event.next_hop == exp["next_hop"]
    assert i == len(events)

    fuzz_base, _ = build_corpus(rng, 60)
    base = bytearray(fuzz_base)
    worst = 0.0
    for _ in range(10_000):
        mutated = bytearray(base)
        for _ in range(rng.randrange(1, 8)):
            mutated[rng.randrange(len(mutated))] = rng.randrange(256)
        t0 = time.perf_counter()
        stats = DecodeStats()
        for _ in decode_stream(io.BytesIO(bytes(mutated)), "rv", stats):
            pass
        worst = max(worst, time.perf_counter() - t0)
    assert worst < 5.0, f"slowest fuzz decode took {worst:.2f}s (limit 5 s)"
    ok(4, "MRT reference round-trip + 10k-mutation fuzz")


def test_criterion_5_determinism(tmp_path):
    rng = random.Random(50_5)
    events = realistic_stream(rng, 100_000, table_size=2500)
    source = tmp_path / "corpus.log"
    with source.open("w") as fh:
        for event in events:
            fh.write(encode_event_line(event))
            fh.write("\n")

    exports = []
    alert_ids = []
    for run in ("a", "b"):
        config = Config(store_dir=tmp_path / run, window_interval=300)
        summary = run_replay([source], config)
        assert summary.events_read == 100_000
        store = Store(tmp_path / run)
        exports.append(b"".join(store.export_windows()))
        alert_ids.append(sorted(a["id"] for a in store.list_alerts()))
    assert exports[0] == exports[1], "window exports differ between replays"
    assert alert_ids[0] == alert_ids[1], "alert ids differ between replays"
    assert len(exports[0]) > 0 and len(alert_ids[0]) > 0
    ok(5, "100k-event replay determinism (byte-identical exports)")


def test_criterion_6_detector_boundaries():
    window = WindowId(0, 300)
    vp, peer, peer_as = VPS[0]

    def length_kind(mask):
        prefix = Prefix.truncate(4, 0x7B000000, mask)
        event = UpdateEvent.announce(
            10, 0, vp, peer, peer_as, prefix, AsPath.sequence([peer_as, 65001])
        )
        alert = detect_length_anomaly(event, window)
        return alert.kind.value if alert else None

    assert length_kind(7) == "short_prefix"
    assert length_kind(8) is None
    assert length_kind(24) is None
    assert length_kind(25) == "long_prefix"

    # packaged RFC 5735 file: parse -> format round-trips, 15 blocks
    from importlib import resources

    raw = resources.files("bgplens").joinpath("data/special_use_v4.txt").read_text()
    tokens = [
        line.split("#", 1)[0].strip()
        for line in raw.splitlines()
        if line.split("#", 1)[0].strip()
    ]
    blocks = default_special_use()
    assert len(blocks) == 15
    assert [str(b) for b in blocks] == tokens

    watch = WatchList()
    for block in blocks:
        event = UpdateEvent.announce(
            10, 0, vp, peer, peer_as, block, AsPath.sequence([peer_as, 65001])
        )
        alert = detect_special_use(event, watch, window)
        assert alert is not None, f"{block} did not self-alert"
        assert alert.kind.value == "special_use"
    ok(6, "length boundaries + RFC 5735 file round-trip and self-alerts")


def test_criterion_7_throughput_and_table_scale():
    rng = random.Random(70_7)
    count = 100_000
    events = realistic_stream(rng, count)

    interval = 300
    batches = {}
    for i, event in enumerate(events):
        start = (event.ts_sec // interval) * interval
        batches.setdefault(start, []).append((event.t_us, i, event))

    # apply+detect: RIB application plus every detector, batched per window
    # exactly as the replay pipeline drives them.
    ribs = {}
    monitor = SecurityMonitor(WatchList())
    started = time.perf_counter()
    for start in sorted(batches):
        window = WindowId(start, interval)
        batch = batches[start]
        batch.sort()
        for _, _, event in batch:
            key = event.rib_key
            rib = ribs.get(key)
            if rib is None:
                rib = ribs[key] = Rib(*key)
            monitor.observe(event, rib.apply_event(event), window)
        monitor.seal_window(window)
    elapsed = time.perf_counter() - started
    rate = count / elapsed
    print(f"\n    apply+detect: {rate:,.0f} events/s ({elapsed:.2f}s for {count:,})")
    assert rate >= 50_000, f"apply+detect sustained only {rate:,.0f} events/s"

    # full-table scale: 660k prefixes load and serve LPM within 4 GiB
    rib = Rib(*VPS[0])
    vp, peer, peer_as = VPS[0]
    seen = set()
    loaded = 0
    while loaded < 660_000:
        prefix = Prefix.truncate(4, rng.getrandbits(32), rng.randint(8, 24))
        if prefix in seen:
            continue
        seen.add(prefix)
        rib.apply_event(
            UpdateEvent.announce(
                1000, 0, vp, peer, peer_as, prefix,
                AsPath.sequence([peer_as, 64601, 64700 + loaded % 1000]),
            )
        )
        loaded += 1
    assert len(rib) == 660_000
    snap = rib.snapshot()
    for _ in range(10_000):
        snap.lookup_lpm(format_address(4, rng.getrandbits(32)))
    peak_gib = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / (1024 ** 2)
    print(f"    660k-prefix table: peak RSS {peak_gib:.2f} GiB")
    assert peak_gib < 4.0, f"peak RSS {peak_gib:.2f} GiB exceeds 4 GiB"
    ok(7, "throughput >= 50k events/s + 660k-prefix table under 4 GiB")
