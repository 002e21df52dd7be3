"""Labelled topologies, the canonic graph and BFS hop distances."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .traces import TraceSet, is_star

#: Marker for unreachable pairs.  ``x > INF`` is always false.
INF = math.inf


def edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Topology:
    """An undirected labelled graph with a set of anonymous nodes."""

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]
    anonymous: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        nodes = frozenset(self.nodes)
        edges = frozenset(edge_key(u, v) for u, v in self.edges)
        anonymous = frozenset(self.anonymous)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in nodes or v not in nodes:
                raise ValueError(f"edge ({u!r}, {v!r}) references a missing node")
        if not anonymous <= nodes:
            raise ValueError("anonymous labels must be nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "anonymous", anonymous)

    @classmethod
    def build(cls, edges: Iterable[tuple[str, str]], nodes: Iterable[str] = (),
              anonymous: Iterable[str] | None = None) -> "Topology":
        """Build from an edge list; anonymity defaults to the ``*`` prefix."""
        edges = [edge_key(u, v) for u, v in edges]
        all_nodes = set(nodes)
        for e in edges:
            all_nodes.update(e)
        if anonymous is None:
            anonymous = {x for x in all_nodes if is_star(x)}
        return cls(frozenset(all_nodes), frozenset(edges), frozenset(anonymous))

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {x: [] for x in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {x: tuple(sorted(nbrs)) for x, nbrs in adj.items()}

    @property
    def named(self) -> frozenset[str]:
        return self.nodes - self.anonymous

    @property
    def anonymous_count(self) -> int:
        return len(self.anonymous)

    def degree(self, node: str) -> int:
        return len(self.adjacency[node])

    def to_json(self) -> dict:
        return {
            "nodes": [{"label": x, "anonymous": x in self.anonymous} for x in sorted(self.nodes)],
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Topology":
        try:
            nodes = [n["label"] for n in obj["nodes"]]
            anonymous = [n["label"] for n in obj["nodes"] if n.get("anonymous", False)]
            edges = [(str(u), str(v)) for u, v in obj["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed topology JSON: {exc}") from None
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node label in topology JSON")
        return cls(frozenset(nodes), frozenset(edges), frozenset(anonymous))


def build_canonic(ts: TraceSet) -> Topology:
    """Every symbol is its own node; every consecutive pair is an edge."""
    edges = set()
    for t in ts.traces:
        for u, v in t.hops():
            edges.add(edge_key(u, v))
    symbols = frozenset(ts.symbols)
    return Topology(symbols, frozenset(edges), frozenset(x for x in symbols if is_star(x)))


def bfs(adjacency: Mapping[str, Iterable[str]], source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in adjacency[x]:
            if y not in dist:
                dist[y] = dx
                queue.append(y)
    return dist


class DistanceTable:
    """Hop distances from a set of sources; unreachable pairs are ``INF``."""

    def __init__(self, rows: dict[str, dict[str, int]]):
        self._rows = rows

    @property
    def sources(self) -> frozenset[str]:
        return frozenset(self._rows)

    def row(self, source: str) -> dict[str, int]:
        return self._rows[source]

    def get(self, a: str, b: str) -> float:
        if a in self._rows:
            return self._rows[a].get(b, INF)
        if b in self._rows:
            return self._rows[b].get(a, INF)
        raise KeyError(f"neither {a!r} nor {b!r} is a source")

    __call__ = get


def all_pairs_distances(g: Topology, sources: Iterable[str] | None = None) -> DistanceTable:
    """BFS from every requested source (all nodes when ``sources`` is None)."""
    srcs = sorted(g.nodes if sources is None else set(sources))
    unknown = [x for x in srcs if x not in g.nodes]
    if unknown:
        raise KeyError(f"unknown source label(s): {unknown}")
    adj = g.adjacency
    return DistanceTable({x: bfs(adj, x) for x in srcs})


def components(g: Topology) -> list[frozenset[str]]:
    seen: set[str] = set()
    comps = []
    for x in sorted(g.nodes):
        if x not in seen:
            comp = frozenset(bfs(g.adjacency, x))
            seen |= comp
            comps.append(comp)
    return comps
