import math

import networkx as nx
import pytest
from hypothesis import given

from startopo.canonic import INF, Topology, all_pairs_distances, build_canonic, components
from startopo.traces import parse_trace_set

from gadgets import to_networkx, two_branch_traces
from test_traces import trace_sets


def test_two_stars_between_same_endpoints():
    g = build_canonic(parse_trace_set("u *1 v\nu *2 v"))
    assert len(g.nodes) == 4
    assert g.edges == {("*1", "u"), ("*1", "v"), ("*2", "u"), ("*2", "v")}
    assert g.anonymous_count == 2


def test_single_link():
    g = build_canonic(parse_trace_set("u v"))
    assert (len(g.nodes), len(g.edges), g.anonymous_count) == (2, 1, 0)


@pytest.mark.parametrize("k", [1, 3, 6])
def test_two_branches_share_endpoint(k):
    g = build_canonic(two_branch_traces(k))
    assert g.anonymous_count == 2
    assert g.degree("u") == 2
    assert nx.is_tree(to_networkx(g))
    assert all_pairs_distances(g, ["v"]).get("v", "w") == 2 * (k + 2)


def test_unreachable_is_infinite():
    g = build_canonic(parse_trace_set("u v\nw x"))
    d = all_pairs_distances(g)
    assert d.get("u", "w") == INF
    assert not (3 > d.get("u", "w"))
    assert d.get("u", "v") == 1
    assert len(components(g)) == 2


def test_chain_distance():
    g = build_canonic(parse_trace_set("u * v"))
    assert all_pairs_distances(g, ["u"]).get("u", "v") == 2


def test_unknown_source():
    g = build_canonic(parse_trace_set("u v"))
    with pytest.raises(KeyError):
        all_pairs_distances(g, ["zz"])


def test_topology_validation():
    with pytest.raises(ValueError):
        Topology.build([("a", "a")])
    with pytest.raises(ValueError):
        Topology(frozenset({"a"}), frozenset({("a", "b")}), frozenset())


def test_json_round_trip_and_order():
    g = build_canonic(parse_trace_set("b *1 a\nc a"))
    obj = g.to_json()
    assert [n["label"] for n in obj["nodes"]] == sorted(n["label"] for n in obj["nodes"])
    assert obj["edges"] == sorted(obj["edges"])
    assert Topology.from_json(obj) == g
    assert {n["label"]: n["anonymous"] for n in obj["nodes"]}["*1"] is True


@given(trace_sets())
def test_edges_are_exactly_trace_hops(ts):
    g = build_canonic(ts)
    hops = {tuple(sorted(h)) for t in ts for h in t.hops()}
    assert g.edges == hops
    assert g.nodes == set(ts.symbols)


@given(trace_sets())
def test_distances_match_networkx_and_traces(ts):
    g = build_canonic(ts)
    d = all_pairs_distances(g)
    ref = dict(nx.all_pairs_shortest_path_length(to_networkx(g)))
    for u in g.nodes:
        for v in g.nodes:
            assert d.get(u, v) == ref[u].get(v, math.inf)
            assert d.get(u, v) == d.get(v, u)
    for t in ts:
        for a in t.symbols:
            for b in t.symbols:
                assert d.get(a, b) <= t.distance(a, b)
    assert len(components(g)) == nx.number_connected_components(to_networkx(g))
