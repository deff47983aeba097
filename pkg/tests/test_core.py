import pytest
from hypothesis import given, strategies as st

from bgplens.core import (
    AsPath,
    EventKind,
    FamilyMismatch,
    NonCanonicalPrefix,
    Prefix,
    PrefixError,
    Segment,
    SegmentKind,
    SetSegmentPresent,
    UpdateEvent,
    WindowId,
    collapse_prepends,
    format_prefix,
    max_prepend_count,
    parse_prefix,
    prefix_contains,
    window_of,
)


def canonical_prefixes(family=4):
    width = 32 if family == 4 else 128
    return st.builds(
        lambda bits, masklen: Prefix.truncate(family, bits, masklen),
        st.integers(min_value=0, max_value=(1 << width) - 1),
        st.integers(min_value=0, max_value=width),
    )


sequence_paths = st.lists(
    st.integers(min_value=0, max_value=0xFFFF_FFFF), min_size=1, max_size=12
).map(AsPath.sequence)


class TestParsePrefix:
    def test_paper_prefix(self):
        p = parse_prefix("123.123.0.0/18")
        assert (p.family, p.masklen) == (4, 18)
        assert str(p) == "123.123.0.0/18"

    def test_default_route(self):
        p = parse_prefix("0.0.0.0/0")
        assert (p.network, p.masklen) == (0, 0)

    def test_host_bits_rejected(self):
        with pytest.raises(NonCanonicalPrefix):
            parse_prefix("123.123.63.1/24")

    @pytest.mark.parametrize(
        "text",
        ["123.123.0.0", "123.123.0.0/", "/18", "1.2.3.4/33", "1.2.3.4/-1",
         "not-an-ip/8", "1.2.3.4/x", "1.2.3.4.5/8"],
    )
    def test_malformed(self, text):
        with pytest.raises(PrefixError):
            parse_prefix(text)

    def test_v6(self):
        p = parse_prefix("2001:db8::/32")
        assert p.family == 6 and p.masklen == 32
        assert str(p) == "2001:db8::/32"

    @given(canonical_prefixes())
    def test_round_trip_v4(self, prefix):
        assert parse_prefix(format_prefix(prefix)) == prefix

    @given(canonical_prefixes(6))
    def test_round_trip_v6(self, prefix):
        assert parse_prefix(format_prefix(prefix)) == prefix


class TestContains:
    def test_paper_example(self):
        assert prefix_contains(
            parse_prefix("123.123.0.0/18"), parse_prefix("123.123.63.0/24")
        )

    def test_reflexive(self):
        p = parse_prefix("10.20.0.0/16")
        assert prefix_contains(p, p)

    def test_sibling_block(self):
        # .63.0 sits in the /18 block starting at .0.0, not the one at .64.0
        assert not prefix_contains(
            parse_prefix("123.123.64.0/18"), parse_prefix("123.123.63.0/24")
        )

    def test_family_mismatch(self):
        with pytest.raises(FamilyMismatch):
            prefix_contains(parse_prefix("0.0.0.0/0"), parse_prefix("::/0"))

    @given(canonical_prefixes(), canonical_prefixes())
    def test_antisymmetric(self, a, b):
        if prefix_contains(a, b) and prefix_contains(b, a):
            assert a == b

    @given(canonical_prefixes(), canonical_prefixes(), canonical_prefixes())
    def test_transitive(self, a, b, c):
        if prefix_contains(a, b) and prefix_contains(b, c):
            assert prefix_contains(a, c)


class TestAsPathOps:
    def test_collapse_plain(self):
        assert collapse_prepends(AsPath.sequence([13, 12, 11, 10])) == (13, 12, 11, 10)

    def test_collapse_prepend(self):
        assert collapse_prepends(AsPath.sequence([7, 7, 7, 5])) == (7, 5)

    def test_collapse_keeps_loops(self):
        assert collapse_prepends(AsPath.sequence([9, 9, 4, 9])) == (9, 4, 9)

    def test_collapse_rejects_sets(self):
        path = AsPath(
            (
                Segment(SegmentKind.SEQUENCE, (1, 2)),
                Segment(SegmentKind.SET, (3, 4)),
            )
        )
        with pytest.raises(SetSegmentPresent):
            collapse_prepends(path)
        with pytest.raises(SetSegmentPresent):
            max_prepend_count(path)

    def test_prepend_counts(self):
        assert max_prepend_count(AsPath.sequence([13, 12, 11, 10])) == 1
        assert max_prepend_count(AsPath.sequence([1, 2, 2, 2, 3])) == 3
        assert max_prepend_count(AsPath.sequence([5, 5, 1, 5, 5, 5])) == 3

    @given(sequence_paths)
    def test_hop_length_vs_collapse(self, path):
        collapsed = collapse_prepends(path)
        assert path.hop_length >= len(collapsed)
        assert (path.hop_length == len(collapsed)) == (max_prepend_count(path) == 1)

    def test_origin_of_set_ending_path(self):
        path = AsPath(
            (
                Segment(SegmentKind.SEQUENCE, (1, 2)),
                Segment(SegmentKind.SET, (3, 4)),
            )
        )
        assert path.origin is None
        assert path.hop_length == 2

    def test_set_members_canonicalised(self):
        seg = Segment(SegmentKind.SET, (4, 3, 4))
        assert seg.asns == (3, 4)


class TestWindows:
    @pytest.mark.parametrize("ts,expected", [(903, 900), (900, 900), (899, 600)])
    def test_floor(self, ts, expected):
        assert window_of(ts, 300).start == expected

    def test_alignment_enforced(self):
        with pytest.raises(ValueError):
            WindowId(10, 300)
        with pytest.raises(ValueError):
            WindowId(0, 0)

    @given(st.integers(min_value=0, max_value=2**33), st.integers(min_value=1, max_value=10_000))
    def test_idempotent(self, ts, interval):
        window = window_of(ts, interval)
        assert window.contains_second(ts)
        for probe in (window.start, window.end - 1):
            assert window_of(probe, interval) == window


class TestUpdateEvent:
    def test_announce_requires_path(self):
        with pytest.raises(ValueError):
            UpdateEvent(0, 0, "vp", "10.0.0.1", 1, EventKind.ANNOUNCE,
                        parse_prefix("10.0.0.0/8"))

    def test_withdraw_forbids_path(self):
        with pytest.raises(ValueError):
            UpdateEvent(0, 0, "vp", "10.0.0.1", 1, EventKind.WITHDRAW,
                        parse_prefix("10.0.0.0/8"), AsPath.sequence([1]), 1)

    def test_origin_consistency(self):
        path = AsPath.sequence([3, 2, 1])
        with pytest.raises(ValueError):
            UpdateEvent(0, 0, "vp", "10.0.0.1", 1, EventKind.ANNOUNCE,
                        parse_prefix("10.0.0.0/8"), path, 99)
        event = UpdateEvent.announce(0, 0, "vp", "10.0.0.1", 1,
                                     parse_prefix("10.0.0.0/8"), path)
        assert event.origin_as == 1

    def test_set_ending_path_unresolved_origin(self):
        path = AsPath((Segment(SegmentKind.SEQUENCE, (5,)), Segment(SegmentKind.SET, (1, 2))))
        event = UpdateEvent.announce(0, 0, "vp", "10.0.0.1", 1,
                                     parse_prefix("10.0.0.0/8"), path)
        assert event.origin_as is None

    def test_microsecond_range(self):
        with pytest.raises(ValueError):
            UpdateEvent.withdraw(0, 1_000_000, "vp", "10.0.0.1", 1,
                                 parse_prefix("10.0.0.0/8"))
