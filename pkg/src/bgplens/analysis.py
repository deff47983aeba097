"""Per-window AS and AS-adjacency stability features.

Transit counts credit an AS once per distinct prefix, however many peers
report a path through it; otherwise the numbers would measure peer fan-out
instead of importance. Edge counts work the same way on direction-normalized
adjacent pairs of the prepend-collapsed path.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import chain, groupby
from typing import Iterable, Mapping, Sequence, TypeVar

from .core import AsPath, Prefix, WindowId
from .rib import RibDelta, RibSnapshot

Edge = tuple[int, int]
S = TypeVar("S")


class NonAdjacentWindows(ValueError):
    """Rank changes are only defined between consecutive windows."""


# Real feeds repeat the same handful of paths per prefix endlessly, so the
# per-path feature extraction is memoized for the life of the process.
_MEMBERS_CACHE: dict[AsPath, frozenset[int]] = {}
_EDGES_CACHE: dict[AsPath, frozenset[Edge]] = {}


def path_member_asns(path: AsPath) -> frozenset[int]:
    """Every AS the path credits, set-segment members included."""
    members = _MEMBERS_CACHE.get(path)
    if members is None:
        members = frozenset(path.iter_asns())
        _MEMBERS_CACHE[path] = members
    return members


def path_edges(path: AsPath) -> frozenset[Edge]:
    """Direction-normalized adjacent pairs after prepend collapse.

    Set segments break adjacency: their members are credited as ASes but
    take part in no edge, since order inside a set is meaningless.
    """
    edges = _EDGES_CACHE.get(path)
    if edges is not None:
        return edges
    found = set()
    for run in path.sequence_runs():
        collapsed = [asn for asn, _ in groupby(run)]
        for a, b in zip(collapsed, collapsed[1:]):
            found.add((a, b) if a <= b else (b, a))
    edges = frozenset(found)
    _EDGES_CACHE[path] = edges
    return edges


@dataclass
class RankSnapshot:
    """Counts and ordinal ranks for one window boundary.

    Ordinals are a permutation of 1..N: descending count, ties broken by
    ascending AS number (edges lexicographically).
    """

    window: WindowId
    as_transit_count: dict[int, int]
    as_rank: dict[int, int]
    origin_count: dict[int, int]
    edge_transit_count: dict[Edge, int]
    edge_rank: dict[Edge, int]


def _ordinal_ranks(counts: Mapping[S, int]) -> dict[S, int]:
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return {subject: i + 1 for i, (subject, _) in enumerate(ordered)}


def compute_rank_snapshot(
    window: WindowId, snapshots: Iterable[RibSnapshot]
) -> RankSnapshot:
    """Rank ASes and edges by the number of distinct prefixes they carry."""
    per_prefix_paths: dict[Prefix, set[AsPath]] = {}
    for snap in snapshots:
        for entry in snap.entries():
            per_prefix_paths.setdefault(entry.prefix, set()).add(entry.path)
    return rank_from_prefix_paths(window, per_prefix_paths)


def rank_from_prefix_paths(
    window: WindowId, per_prefix_paths: dict[Prefix, set[AsPath]]
) -> RankSnapshot:
    """Rank from an already-deduplicated prefix -> installed paths map."""
    as_sets = []
    origin_sets = []
    edge_sets = []
    for paths in per_prefix_paths.values():
        if len(paths) == 1:
            (path,) = paths
            as_sets.append(path_member_asns(path))
            edge_sets.append(path_edges(path))
            if path.origin is not None:
                origin_sets.append((path.origin,))
            continue
        asns: set[int] = set()
        origins: set[int] = set()
        edges: set[Edge] = set()
        for path in paths:
            asns.update(path_member_asns(path))
            edges.update(path_edges(path))
            if path.origin is not None:
                origins.add(path.origin)
        as_sets.append(asns)
        origin_sets.append(origins)
        edge_sets.append(edges)

    as_count = Counter(chain.from_iterable(as_sets))
    edge_count = Counter(chain.from_iterable(edge_sets))
    return RankSnapshot(
        window=window,
        as_transit_count=as_count,
        as_rank=_ordinal_ranks(as_count),
        origin_count=Counter(chain.from_iterable(origin_sets)),
        edge_transit_count=edge_count,
        edge_rank=_ordinal_ranks(edge_count),
    )


@dataclass
class PathChangeCounts:
    """Table-change activity for one window, under three keyings."""

    per_prefix: dict[Prefix, int]
    per_as: dict[int, int]
    per_edge: dict[Edge, int]


def path_change_counts(deltas: Iterable[RibDelta]) -> PathChangeCounts:
    """Count path-changing deltas; each delta credits every AS and edge on
    its old and new collapsed paths once."""
    per_prefix: Counter = Counter()
    as_sets = []
    edge_sets = []
    for delta in deltas:
        if not delta.path_changed:
            continue
        per_prefix[delta.prefix] += 1
        old, new = delta.old_path, delta.new_path
        if old is None:
            as_sets.append(path_member_asns(new))
            edge_sets.append(path_edges(new))
        elif new is None:
            as_sets.append(path_member_asns(old))
            edge_sets.append(path_edges(old))
        else:
            as_sets.append(path_member_asns(old) | path_member_asns(new))
            edge_sets.append(path_edges(old) | path_edges(new))
    return PathChangeCounts(
        per_prefix,
        Counter(chain.from_iterable(as_sets)),
        Counter(chain.from_iterable(edge_sets)),
    )


def _rank_changes(
    prev: Mapping[S, int], cur: Mapping[S, int]
) -> dict[S, int | None]:
    # Positive change = rose in importance; None = unranked before.
    return {
        subject: (prev[subject] - rank) if subject in prev else None
        for subject, rank in cur.items()
    }


def rank_delta(prev: RankSnapshot, cur: RankSnapshot) -> tuple[
    dict[int, int | None], dict[Edge, int | None]
]:
    """Signed ordinal movement per AS and per edge between adjacent windows."""
    if prev.window.next() != cur.window:
        raise NonAdjacentWindows(
            f"windows {prev.window.start} and {cur.window.start} are not adjacent"
        )
    return _rank_changes(prev.as_rank, cur.as_rank), _rank_changes(
        prev.edge_rank, cur.edge_rank
    )


def rank_change_frequency(ranks: Sequence[int | None]) -> float | None:
    """Share of window-to-window transitions where the rank moved.

    Only transitions with the subject ranked on both sides count; with no
    usable transition the frequency is undefined (None).
    """
    changed = 0
    available = 0
    for a, b in zip(ranks, ranks[1:]):
        if a is None or b is None:
            continue
        available += 1
        if a != b:
            changed += 1
    if available == 0:
        return None
    return changed / available


@dataclass(frozen=True, slots=True)
class StabilityRecord:
    subject: int | Edge
    window: WindowId
    path_change_count: int
    rank: int
    rank_change: int | None
    rank_change_frequency: float | None


TOP_N_METRICS = (
    "transit_count",
    "origin_prefix_count",
    "path_change_count",
    "rank_change_frequency",
)


def top_n(values: Mapping[S, int | float], n: int) -> list[tuple[S, int | float]]:
    """Largest-first, ties broken by ascending subject, at most n entries."""
    if n < 0:
        raise ValueError("n must be non-negative")
    ordered = sorted(values.items(), key=lambda item: (-item[1], item[0]))
    return ordered[:n]


@dataclass(frozen=True, slots=True)
class PathMetrics:
    """Shape of the paths observed between two ASes over a period.

    Hop counts keep prepends; uniqueness is judged on collapsed sub-paths;
    prepend_range spans only sub-paths that actually contain a prepend.
    Empty metrics (no path carried both ASes) leave the bounds None.
    """

    as_a: int
    as_b: int
    period: tuple[int, int] | None
    path_count: int
    shortest_hops: int | None
    longest_hops: int | None
    longest_unique_path_len: int | None
    unique_path_count: int
    largest_prepend: int | None
    prepend_range: tuple[int, int] | None

    @property
    def empty(self) -> bool:
        return self.path_count == 0


def path_metrics(
    paths: Iterable[Sequence[int]],
    as_a: int,
    as_b: int,
    period: tuple[int, int] | None = None,
) -> PathMetrics:
    """Compare two ASes over raw (set-free) observed paths.

    For every path containing both, the sub-path between their first
    occurrences is taken; direction is normalized so (a, b) and (b, a)
    yield identical metrics.
    """
    if as_a == as_b:
        raise ValueError("path metrics need two distinct ASes")
    lo_as, hi_as = (as_a, as_b) if as_a < as_b else (as_b, as_a)

    sub_paths: list[tuple[int, ...]] = []
    for path in paths:
        seq = tuple(path)
        if as_a not in seq or as_b not in seq:
            continue
        i = seq.index(as_a)
        j = seq.index(as_b)
        lo, hi = (i, j) if i <= j else (j, i)
        sub = seq[lo : hi + 1]
        if sub[0] != lo_as:
            sub = sub[::-1]
        sub_paths.append(sub)

    if not sub_paths:
        return PathMetrics(
            lo_as, hi_as, period, 0, None, None, None, 0, None, None
        )

    collapsed = [tuple(asn for asn, _ in groupby(sub)) for sub in sub_paths]
    max_runs = [max(len(list(g)) for _, g in groupby(sub)) for sub in sub_paths]
    hop_counts = [len(sub) for sub in sub_paths]
    prepended = [r for r in max_runs if r > 1]
    return PathMetrics(
        as_a=lo_as,
        as_b=hi_as,
        period=period,
        path_count=len(sub_paths),
        shortest_hops=min(hop_counts),
        longest_hops=max(hop_counts),
        longest_unique_path_len=max(len(c) for c in collapsed),
        unique_path_count=len(set(collapsed)),
        largest_prepend=max(max_runs),
        prepend_range=(min(prepended), max(prepended)) if prepended else None,
    )
