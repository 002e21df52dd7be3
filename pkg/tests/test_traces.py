from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from startopo.traces import (Trace, TraceFormatError, TraceSet, as_alpha, ceil_alpha,
                             parse_trace_set, serialize_trace_set, trace_distance)

from gadgets import two_branch_traces


def test_single_bare_star_is_numbered_one():
    ts = parse_trace_set("u * v")
    assert ts.traces[0].symbols == ("u", "*1", "v")


def test_counts_for_two_traces():
    st_ = parse_trace_set("u *1 v\nw *2 v").stats
    assert (st_.n, st_.s, st_.N) == (3, 2, 5)


def test_bytes_input_and_comments():
    ts = parse_trace_set(b"# header\nu * v  # trailing\n\n  a b\n")
    assert [t.symbols for t in ts] == [("u", "*1", "v"), ("a", "b")]


@pytest.mark.parametrize("text", [
    "* u v",          # star endpoint
    "u v *",
    "u",              # too short
    "u *1 v\nw *1 v",  # duplicate explicit id
    "u a a v",        # repeated symbol
    "u * v\nw *3 v",  # mixed numbering
    "u *x v",
    "u b@d v",
    "u *0 v",
])
def test_rejects_malformed_input(text):
    with pytest.raises(TraceFormatError):
        parse_trace_set(text)


def test_error_carries_line_number():
    with pytest.raises(TraceFormatError) as info:
        parse_trace_set("u v\nu x x v\n")
    assert info.value.line == 2


def test_empty_trace_set_is_valid():
    ts = parse_trace_set("# nothing here\n")
    assert len(ts) == 0 and ts.stats.N == 0


def test_identical_named_traces_may_repeat():
    assert len(parse_trace_set("u v\nu v")) == 2


def test_nu_counts_distinct_named_links():
    ts = parse_trace_set("a b *1 c\nb a\nc *2 d e")
    assert ts.stats.nu == 2


def test_trace_distance():
    t = Trace(("u", "*1", "v"))
    assert trace_distance(t, "u", "v") == 2
    assert trace_distance(t, "u", "*1") == 1
    with pytest.raises(KeyError):
        trace_distance(t, "u", "w")
    k = 4
    assert two_branch_traces(k).traces[0].distance("v", "u") == k + 2


@pytest.mark.parametrize("alpha,k,expected", [
    (Fraction(1), 5, 5), (Fraction(1, 2), 5, 3), (Fraction(2, 3), 7, 5), (Fraction(1, 3), 0, 0),
])
def test_ceil_alpha(alpha, k, expected):
    assert ceil_alpha(alpha, k) == expected


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 200))
def test_ceil_alpha_matches_integer_oracle(p, q, k):
    if p > q:
        p, q = q, p
    assert ceil_alpha(Fraction(p, q), k) == (p * k + q - 1) // q


@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30), st.integers(0, 60))
def test_ceil_alpha_monotone(p, q, r, k):
    a, b = sorted([Fraction(min(p, q), max(p, q)), Fraction(min(p, r), max(p, r))])
    assert ceil_alpha(a, k) <= ceil_alpha(b, k)
    assert ceil_alpha(a, k) <= ceil_alpha(a, k + 1)
    assert ceil_alpha(Fraction(1), k) == k


@pytest.mark.parametrize("text,value", [("1", Fraction(1)), ("2/3", Fraction(2, 3)),
                                        (" 1 / 2 ", Fraction(1, 2))])
def test_alpha_parsing(text, value):
    assert as_alpha(text) == value


@pytest.mark.parametrize("text", ["0.5", "0", "3/2", "1/0", "-1/2", "half"])
def test_alpha_rejects(text):
    with pytest.raises(ValueError):
        as_alpha(text)


named = st.text(alphabet="abcdefgxyz0123456789_.:-", min_size=1, max_size=4)


@st.composite
def trace_sets(draw):
    rows = draw(st.lists(st.lists(named, min_size=2, max_size=6, unique=True), max_size=6))
    sid = 0
    traces = []
    for row in rows:
        out = [row[0]]
        for sym in row[1:-1]:
            if draw(st.booleans()):
                sid += 1
                out.append(f"*{sid}")
            else:
                out.append(sym)
        out.append(row[-1])
        if len(set(out)) == len(out):
            traces.append(out)
    return TraceSet.from_lists(traces)


@given(trace_sets())
def test_serialize_parse_round_trip(ts):
    again = parse_trace_set(serialize_trace_set(ts))
    assert [t.symbols for t in again] == [t.symbols for t in ts]


@given(trace_sets(), st.data())
def test_trace_distance_triangle_inequality(ts, data):
    for t in ts:
        a, b, c = (data.draw(st.sampled_from(t.symbols)) for _ in range(3))
        assert t.distance(a, c) <= t.distance(a, b) + t.distance(b, c)
        ia, ib, ic = (t.positions[x] for x in (a, b, c))
        if min(ia, ic) <= ib <= max(ia, ic):
            assert t.distance(a, c) == t.distance(a, b) + t.distance(b, c)


@given(trace_sets())
def test_stats_invariants(ts):
    stats = ts.stats
    assert stats.N == stats.n + stats.s
    assert stats.N == len(ts.symbols)
