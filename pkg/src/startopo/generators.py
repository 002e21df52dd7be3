"""Ground-truth networks with trace sets: extremal gadgets and random sampling.

Every generator returns a :class:`GroundTruth` whose topology is restricted
to the links its traces actually traverse, so the trace set covers it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from random import Random
from typing import Iterable, Sequence

from .canonic import Topology, bfs, edge_key
from .metrics import uncovered_pairs
from .traces import TraceSet, as_alpha, ceil_alpha, star_symbol


@dataclass(frozen=True)
class GroundTruth:
    topology: Topology
    traces: TraceSet
    mapping: dict = field(hash=False)
    alpha: Fraction = Fraction(1)
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "seed": self.seed,
            "topology": self.topology.to_json(),
            "mapping": dict(sorted(self.mapping.items())),
        }


def _assemble(walks: Sequence[Sequence[tuple[str, str]]], anonymous: Iterable[str],
              alpha: Fraction = Fraction(1), seed: int | None = None,
              extra_nodes: Iterable[str] = ()) -> GroundTruth:
    """Build a ground truth from traces given as (symbol, network node) pairs."""
    anonymous = set(anonymous)
    mapping: dict[str, str] = {}
    edges = set()
    nodes = set(extra_nodes)
    traces = []
    for walk in walks:
        traces.append(tuple(sym for sym, _ in walk))
        for sym, node in walk:
            if mapping.setdefault(sym, node) != node:
                raise ValueError(f"symbol {sym!r} mapped to two nodes")
            nodes.add(node)
        for (_, a), (_, b) in zip(walk, walk[1:]):
            edges.add(edge_key(a, b))
    topo = Topology(frozenset(nodes), frozenset(edges), frozenset(nodes & anonymous))
    return GroundTruth(topo, TraceSet.from_lists(traces), mapping, alpha, seed)


def _walks_from_paths(paths: Sequence[Sequence[str]], anonymous: set[str],
                      first_star: int = 1) -> list[list[tuple[str, str]]]:
    walks = []
    sid = first_star
    for path in paths:
        walk = []
        for node in path:
            if node in anonymous:
                walk.append((star_symbol(sid), node))
                sid += 1
            else:
                walk.append((node, node))
        walks.append(walk)
    return walks


def gen_star_network(s: int) -> GroundTruth:
    """One anonymous hub joined to 2s named leaves, traced as (v_i, *_i, w_i)."""
    if s < 1:
        raise ValueError("s must be at least 1")
    walks = [[(f"v{i}", f"v{i}"), (star_symbol(i), "x"), (f"w{i}", f"w{i}")]
             for i in range(1, s + 1)]
    return _assemble(walks, {"x"})


def gen_diameter_chain(s: int, x: int) -> GroundTruth:
    """A path u_1 ... u_{s+1}; each segment has x named nodes with a star in the middle."""
    if s < 1:
        raise ValueError("s must be at least 1")
    if x < 2 or x % 2:
        raise ValueError("x must be an even integer >= 2")
    walks = []
    for i in range(1, s + 1):
        inner = [(f"p{i}.{j}", f"p{i}.{j}") for j in range(1, x + 1)]
        walk = ([(f"u{i}", f"u{i}")] + inner[: x // 2] + [(star_symbol(i), f"y{i}")]
                + inner[x // 2:] + [(f"u{i + 1}", f"u{i + 1}")])
        walks.append(walk)
    return _assemble(walks, {f"y{i}" for i in range(1, s + 1)})


def realize_tau(alpha: Fraction) -> int:
    """Chain length ``ceil(3 / (2 alpha) - 1/2)`` used by :func:`realize_star_graph`."""
    return math.ceil(Fraction(3) / (2 * alpha) - Fraction(1, 2))


def realize_star_graph(vertices: Iterable[int], edges: Iterable[tuple[int, int]],
                       alpha: Fraction) -> GroundTruth:
    """A trace set whose star graph is exactly the given graph.

    Vertex ids must be positive; vertex ``i`` becomes star ``*i``.  Each
    vertex gets a tail of tau named nodes, an anonymous node and a final
    named node; each graph edge is probed by one shortest trace of length
    ``2 tau + 1`` between the tails.
    """
    alpha = as_alpha(alpha)
    verts = sorted(set(vertices))
    if not verts:
        raise ValueError("graph needs at least one vertex")
    if verts[0] < 1:
        raise ValueError("vertex ids must be positive")
    tau = realize_tau(alpha)

    def w(i: int, k: int) -> tuple[str, str]:
        return (f"w{i}.{k}", f"w{i}.{k}")

    walks = [[w(i, tau), (star_symbol(i), f"u{i}"), w(i, tau + 1)] for i in verts]
    for a, b in sorted({(min(e), max(e)) for e in edges}):
        if a == b:
            raise ValueError("graph must be simple")
        walk = ([w(a, k) for k in range(tau, 0, -1)] + [(f"v{a}", f"v{a}"), (f"v{b}", f"v{b}")]
                + [w(b, k) for k in range(1, tau + 1)])
        walks.append(walk)
    return _assemble(walks, {f"u{i}" for i in verts}, alpha)


def gen_fullexp_diameter(k: int) -> GroundTruth:
    """Fully explored gadget whose diameter halves when the two middle stars merge.

    Hub ``c`` with four rays of k+1 hops ending at u1..u4, all named; two
    anonymous chains of 2k+1 nodes join u1-u2 and u3-u4.  Six traces join
    the ray ends through the hub, two traces run along the chains.  The
    middle stars are ``*(k+1)`` and ``*(3k+2)``; s = 4k+2.
    """
    if k < 1:
        raise ValueError("k must be at least 1")

    def ray(j: int) -> list[str]:
        return [f"u{j}"] + [f"r{j}.{i}" for i in range(k, 0, -1)] + ["c"]

    paths = [ray(i) + ray(j)[::-1][1:] for i, j in combinations(range(1, 5), 2)]
    chain1 = [f"a1.{i}" for i in range(1, 2 * k + 2)]
    chain2 = [f"a2.{i}" for i in range(1, 2 * k + 2)]
    paths.append(["u1"] + chain1 + ["u2"])
    paths.append(["u3"] + chain2 + ["u4"])
    anon = set(chain1) | set(chain2)
    return _assemble(_walks_from_paths(paths, anon), anon)


def fullexp_diameter_middles(k: int) -> tuple[int, int]:
    return (k + 1, 3 * k + 2)


def gen_fullexp_triangles(s: int) -> GroundTruth:
    """Traces (v_i, *_i, w) plus every named pair (v_i, v_j); no star conflicts."""
    if s < 2:
        raise ValueError("s must be at least 2")
    walks = [[(f"v{i}", f"v{i}"), (star_symbol(i), "x"), ("w", "w")] for i in range(1, s + 1)]
    walks += [[(f"v{i}", f"v{i}"), (f"v{j}", f"v{j}")]
              for i, j in combinations(range(1, s + 1), 2)]
    return _assemble(walks, {"x"})


def gen_triangle_ratio() -> GroundTruth:
    """Three fully explored traces where merging the two stars creates the only triangle."""
    walks = [
        [("v", "v"), ("*1", "x"), ("w", "w")],
        [("u", "u"), ("*2", "x"), ("w", "w")],
        [("u", "u"), ("v", "v")],
    ]
    return _assemble(walks, {"x"})


# -- sampling ----------------------------------------------------------------------

def _shortest_walk(adj, dist_to_t: dict[str, int], s: str, rng: Random | None) -> list[str]:
    path = [s]
    x = s
    while dist_to_t[x] > 0:
        nxt = [y for y in adj[x] if dist_to_t.get(y) == dist_to_t[x] - 1]
        x = rng.choice(nxt) if rng is not None else nxt[0]
        path.append(x)
    return path


def _admissible_walk(adj, dist: dict[str, dict[str, int]], s: str, t: str, alpha: Fraction,
                     rng: Random, budget: int = 20000) -> list[str] | None:
    maxlen = (dist[s][t] * alpha.denominator) // alpha.numerator
    path = [s]
    on_path = {s}
    expansions = 0

    def rec() -> bool:
        nonlocal expansions
        x = path[-1]
        if x == t:
            return True
        nbrs = list(adj[x])
        rng.shuffle(nbrs)
        for y in nbrs:
            hops = len(path)
            if y in on_path or hops + dist[y].get(t, math.inf) > maxlen:
                continue
            if any(dist[path[i]][y] < ceil_alpha(alpha, hops - i) for i in range(hops)):
                continue
            expansions += 1
            if expansions > budget:
                return False
            path.append(y)
            on_path.add(y)
            if rec():
                return True
            path.pop()
            on_path.discard(y)
        return False

    return path if rec() else None


def sample_traces(g0: Topology, pairs: Sequence[tuple[str, str]], alpha: Fraction,
                  seed: int) -> GroundTruth:
    """Probe ``g0`` once per pair along a random alpha-admissible path.

    At alpha = 1 the path is a uniformly drawn shortest path (uniform choice
    among BFS-DAG successors at each step).  Below 1, a randomised bounded
    search looks for a simple path whose every sub-segment respects the
    consistency bound, falling back to a shortest path.
    """
    alpha = as_alpha(alpha)
    rng = Random(seed)
    adj = g0.adjacency
    dist = {x: bfs(adj, x) for x in sorted(g0.nodes)} if alpha < 1 else None
    paths = []
    for u, v in pairs:
        for x in (u, v):
            if x not in g0.nodes or x in g0.anonymous:
                raise ValueError(f"trace endpoint {x!r} must be a named node of g0")
        if u == v:
            raise ValueError("trace endpoints must differ")
        dist_v = bfs(adj, v)
        if u not in dist_v:
            raise ValueError(f"{u!r} and {v!r} are disconnected")
        path = None
        if alpha < 1:
            path = _admissible_walk(adj, dist, u, v, alpha, rng)
        if path is None:
            path = _shortest_walk(adj, dist_v, u, rng)
        paths.append(path)
    anon = set(g0.anonymous)
    return _assemble(_walks_from_paths(paths, anon), anon, alpha, seed)


def random_topology(rng: Random, max_nodes: int = 20, anon_frac: float = 0.3,
                    min_nodes: int = 4) -> Topology:
    """Random connected graph: a random tree plus a few chords."""
    n = rng.randint(min_nodes, max_nodes)
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    anon = set(rng.sample(range(n), rng.randint(0, int(anon_frac * n))))

    def label(i: int) -> str:
        return f"x{i}" if i in anon else f"n{i}"

    return Topology(
        frozenset(label(i) for i in range(n)),
        frozenset(edge_key(label(a), label(b)) for a, b in edges),
        frozenset(label(i) for i in anon),
    )


def random_ground_truth(seed: int, max_nodes: int = 20, anon_frac: float = 0.3,
                        max_pairs: int = 15, alpha: Fraction = Fraction(1)) -> GroundTruth:
    rng = Random(seed)
    g0 = random_topology(rng, max_nodes, anon_frac)
    named = sorted(g0.named)
    all_pairs = list(combinations(named, 2))
    pairs = rng.sample(all_pairs, min(len(all_pairs), rng.randint(1, max_pairs)))
    gt = sample_traces(g0, pairs, alpha, rng.randrange(2**32))
    return GroundTruth(gt.topology, gt.traces, gt.mapping, gt.alpha, seed)


# -- full exploration ----------------------------------------------------------------

def _named_only_path(adj, anonymous, s: str, t: str) -> list[str] | None:
    prev = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if x == t:
            break
        for y in adj[x]:
            if y not in prev and y not in anonymous:
                prev[y] = x
                queue.append(y)
    if t not in prev:
        return None
    path = [t]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def make_fully_explored(gt: GroundTruth, preserve_degrees: bool = False,
                        max_rounds: int = 8) -> GroundTruth:
    """Add traces until every named pair of a ground-truth component shares a trace.

    By default each missing pair gets a shortest-path trace through the
    network (anonymous nodes become fresh stars).  With
    ``preserve_degrees`` no star is ever added: a pair is traced along a
    shortest path made of named nodes only, or, failing that, through a new
    chain of named relay nodes of the same length, so anonymous degrees and
    all existing distances stay unchanged.
    """
    if gt.alpha != 1:
        raise ValueError("full exploration is defined for alpha = 1 only")
    nodes = set(gt.topology.nodes)
    edges = set(gt.topology.edges)
    anonymous = set(gt.topology.anonymous)
    walks = [[(sym, gt.mapping[sym]) for sym in t.symbols] for t in gt.traces]
    next_star = gt.traces.next_star_id()
    relay = 0

    for _ in range(max_rounds):
        g0 = Topology(frozenset(nodes), frozenset(edges), frozenset(anonymous))
        ts = TraceSet.from_lists([[s for s, _ in w] for w in walks])
        missing = uncovered_pairs(ts, g0)
        if not missing:
            return _assemble(walks, anonymous, gt.alpha, gt.seed)
        covered: set[tuple[str, str]] = set()
        adj = g0.adjacency
        for v, w in missing:
            if (v, w) in covered:
                continue
            dist_w = bfs(adj, w)
            path = _shortest_walk(adj, dist_w, v, None)
            if preserve_degrees:
                named_path = _named_only_path(adj, anonymous, v, w)
                if named_path is not None and len(named_path) == len(path):
                    path = named_path
                else:
                    chain = []
                    for _ in range(len(path) - 2):
                        relay += 1
                        while f"relay{relay}" in nodes:
                            relay += 1
                        chain.append(f"relay{relay}")
                    path = [v] + chain + [w]
                    nodes.update(chain)
                    edges.update(edge_key(a, b) for a, b in zip(path, path[1:]))
            walk = _walks_from_paths([path], anonymous, next_star)[0]
            next_star += sum(1 for node in path if node in anonymous)
            walks.append(walk)
            named = sorted(sym for sym, _ in walk if not sym.startswith("*"))
            covered.update(combinations(named, 2))
    raise RuntimeError(f"trace set still not fully explored after {max_rounds} rounds")
