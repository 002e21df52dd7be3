from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from startopo.axioms import (MappingError, effective_alpha, identity_mapping, load_mapping,
                             verify)
from startopo.canonic import Topology, build_canonic
from startopo.enumeration import MergePartition, induce_topology
from startopo.generators import random_ground_truth
from startopo.traces import ceil_alpha, parse_trace_set

from gadgets import to_networkx
from test_traces import trace_sets

ONE = Fraction(1)
ALPHAS = [Fraction(1), Fraction(3, 4), Fraction(2, 3), Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)]


def brute_force_passes(ts, g, mapping, alpha):
    """Independent restatement of the three axioms on networkx."""
    nxg = to_networkx(g)
    dist = dict(nx.all_pairs_shortest_path_length(nxg))
    hops = set()
    for t in ts:
        images = [mapping[x] for x in t.symbols]
        if len(set(images)) != len(images):
            return False
        for a, b in zip(images, images[1:]):
            if not nxg.has_edge(a, b):
                return False
            hops.add(frozenset((a, b)))
        for i, j in combinations(range(len(images)), 2):
            if dist[images[i]].get(images[j], float("inf")) < ceil_alpha(alpha, j - i):
                return False
    return hops == {frozenset(e) for e in g.edges}


@pytest.mark.parametrize("seed", range(5))
def test_canonic_graph_passes_on_sampled_traces(seed):
    gt = random_ground_truth(seed)
    g = build_canonic(gt.traces)
    assert verify(gt.traces, g, identity_mapping(gt.traces), ONE).passed
    assert effective_alpha(gt.traces, g, identity_mapping(gt.traces)) == 1


def test_four_star_double_merge(four_star):
    ts = four_star
    p = MergePartition(((1, 2), (3, 4)))
    g = induce_topology(ts, p)
    m = p.mapping(ts)
    bad = verify(ts, g, m, ONE)
    st_ = [v for v in bad.violations if v.axiom == 2 and set(v.pair) == {"s", "t"}]
    assert st_ and st_[0].required == 10 and st_[0].actual == 4
    assert effective_alpha(ts, g, m) == Fraction(4, 10)
    assert verify(ts, g, m, Fraction(2, 5)).passed


def test_untraced_edge_violates_axiom_zero():
    ts = parse_trace_set("u v w")
    g = Topology.build([("u", "v"), ("v", "w"), ("u", "w")])
    v = verify(ts, g, identity_mapping(ts), ONE)
    assert v.first(0).pair == ("u", "w")
    assert not v


def test_missing_link_violates_axiom_one():
    ts = parse_trace_set("u v\nv w")
    g = Topology.build([("u", "v")], nodes=["w"])
    assert verify(ts, g, identity_mapping(ts), ONE).first(1) is not None


def test_single_link_effective_alpha():
    ts = parse_trace_set("u v")
    g = Topology.build([("u", "v")])
    assert effective_alpha(ts, g, identity_mapping(ts)) == 1


def test_violation_limit_and_json():
    ts = parse_trace_set("\n".join(f"a{i} *{i} b{i}" for i in range(1, 30)))
    labels = {f"*{i}": "*x" for i in range(1, 30)}
    g = Topology.build([(f"a{i}", "*x") for i in range(1, 30)] + [(f"b{i}", "*x") for i in range(1, 30)]
                       + [("a1", "b2"), ("a2", "b3"), ("a3", "b4")])
    mapping = {**identity_mapping(ts), **labels}
    v = verify(ts, g, mapping, ONE, limit=2)
    assert len(v.violations) == 2 and v.truncated
    assert v.to_json()["violations"][0]["axiom"] == 0


@pytest.mark.parametrize("mapping,match", [
    ({"u": "u"}, "not total"),
    ({"u": "u", "*1": "v", "v": "v"}, "named"),
    ({"u": "v", "*1": "*1", "v": "v"}, "must map"),
    ({"u": "u", "*1": "*1", "v": "v", "extra": "x"}, None),
])
def test_mapping_errors(mapping, match):
    ts = parse_trace_set("u *1 v")
    g = Topology.build([("u", "*1"), ("*1", "v")])
    if match is None:
        assert verify(ts, g, mapping, ONE).passed
    else:
        with pytest.raises(MappingError, match=match):
            verify(ts, g, mapping, ONE)


def test_mapping_not_surjective():
    ts = parse_trace_set("u *1 v")
    g = Topology.build([("u", "*1"), ("*1", "v")], nodes=["lonely"])
    with pytest.raises(MappingError, match="surjective"):
        verify(ts, g, identity_mapping(ts), ONE)


def test_disconnected_images_raise():
    ts = parse_trace_set("u v")
    g = Topology.build([], nodes=["u", "v"])
    with pytest.raises(ValueError):
        effective_alpha(ts, g, identity_mapping(ts))


def test_load_mapping():
    assert load_mapping({"*1": "*1,2"}) == {"*1": "*1,2"}
    with pytest.raises(ValueError):
        load_mapping([1, 2])


@st.composite
def merged_instances(draw):
    ts = draw(trace_sets())
    stars = list(ts.stars)
    labels = [draw(st.integers(0, max(len(stars) - 1, 0))) for _ in stars]
    blocks = {}
    for s, b in zip(stars, labels):
        blocks.setdefault(b, []).append(s)
    p = MergePartition(tuple(tuple(b) for b in blocks.values()))
    return ts, p


@given(merged_instances(), st.sampled_from(ALPHAS))
def test_verify_agrees_with_brute_force(inst, alpha):
    ts, p = inst
    g = induce_topology(ts, p)
    m = p.mapping(ts)
    assert verify(ts, g, m, alpha).passed == brute_force_passes(ts, g, m, alpha)


@given(merged_instances(), st.sampled_from(ALPHAS), st.sampled_from(ALPHAS))
def test_rejection_is_monotone(inst, a, b):
    ts, p = inst
    g = induce_topology(ts, p)
    m = p.mapping(ts)
    hi, lo = max(a, b), min(a, b)
    if verify(ts, g, m, hi).passed:
        assert verify(ts, g, m, lo).passed


@given(merged_instances(), st.sampled_from(ALPHAS))
def test_passing_implies_effective_alpha_at_least_alpha(inst, alpha):
    ts, p = inst
    g = induce_topology(ts, p)
    m = p.mapping(ts)
    if verify(ts, g, m, alpha).passed and len(ts):
        assert effective_alpha(ts, g, m) >= alpha
