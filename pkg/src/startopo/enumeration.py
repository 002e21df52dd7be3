"""Enumerating inferrable topologies as merge partitions of the stars."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from itertools import islice
from math import comb, factorial
from typing import Iterable, Iterator

from .axioms import Verdict, Violation, verify
from .canonic import Topology, edge_key
from .stargraph import LimitExceeded, StarGraph, build_star_graph
from .traces import TraceSet, is_star, star_id

DEFAULT_MAX_STARS = 12
DEFAULT_MAX_PARTITIONS = 10**6


class NotIndependentError(ValueError):
    pass


@dataclass(frozen=True)
class MergePartition:
    """Disjoint blocks of star ids; each block becomes one anonymous node."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        if any(not b for b in blocks):
            raise ValueError("empty block")
        members = [x for b in blocks for x in b]
        if len(set(members)) != len(members):
            raise ValueError("blocks overlap")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def singletons(cls, stars: Iterable[int]) -> "MergePartition":
        return cls(tuple((s,) for s in stars))

    @classmethod
    def from_rgs(cls, stars: tuple[int, ...], rgs: Iterable[int]) -> "MergePartition":
        blocks: dict[int, list[int]] = {}
        for s, b in zip(stars, rgs):
            blocks.setdefault(b, []).append(s)
        return cls(tuple(tuple(b) for b in blocks.values()))

    @property
    def stars(self) -> tuple[int, ...]:
        return tuple(sorted(x for b in self.blocks for x in b))

    @staticmethod
    def block_label(block: Iterable[int]) -> str:
        return "*" + ",".join(str(x) for x in sorted(block))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.block_label(b) for b in self.blocks)

    def star_to_label(self) -> dict[int, str]:
        return {x: self.block_label(b) for b in self.blocks for x in b}

    def mapping(self, ts: TraceSet) -> dict[str, str]:
        labels = self.star_to_label()
        return {s: (labels[star_id(s)] if is_star(s) else s) for s in ts.symbols}

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def induce_topology(ts: TraceSet, partition: MergePartition,
                    star_graph: StarGraph | None = None) -> Topology:
    """Contract each block of stars of the canonic graph into one node.

    When ``star_graph`` is given every block must be independent in it.
    Hops whose endpoints land on the same node are dropped.
    """
    if partition.stars != ts.stars:
        raise ValueError("partition does not cover exactly the stars of the trace set")
    if star_graph is not None:
        for b in partition.blocks:
            for i, x in enumerate(b):
                for y in b[i + 1:]:
                    if star_graph.adjacent(x, y):
                        raise NotIndependentError(f"stars {x} and {y} conflict")
    mapping = partition.mapping(ts)
    edges = set()
    for t in ts.traces:
        for a, b in t.hops():
            ma, mb = mapping[a], mapping[b]
            if ma != mb:
                edges.add(edge_key(ma, mb))
    nodes = frozenset(mapping.values())
    return Topology(nodes, frozenset(edges), frozenset(x for x in nodes if is_star(x)))


def iter_independent_partitions(g: StarGraph) -> Iterator[MergePartition]:
    """Partitions of the stars into independent sets, in restricted-growth order."""
    stars = g.vertices
    adj = g.adjacency
    blocks: list[list[int]] = []
    rgs: list[int] = []

    def rec(i: int) -> Iterator[MergePartition]:
        if i == len(stars):
            yield MergePartition.from_rgs(stars, rgs)
            return
        s = stars[i]
        nbrs = adj[s]
        for bi, block in enumerate(blocks):
            if nbrs.isdisjoint(block):
                block.append(s)
                rgs.append(bi)
                yield from rec(i + 1)
                rgs.pop()
                block.pop()
        blocks.append([s])
        rgs.append(len(blocks) - 1)
        yield from rec(i + 1)
        rgs.pop()
        blocks.pop()

    return rec(0)


@dataclass(frozen=True)
class Ensemble:
    traces: TraceSet
    alpha: Fraction
    star_graph: StarGraph
    partitions: tuple[MergePartition, ...]
    topologies: tuple[Topology, ...]
    truncated: bool = False
    candidates: int = 0
    rejected: tuple[tuple[MergePartition, Violation], ...] = field(default=(), repr=False)

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(zip(self.partitions, self.topologies))


def _check_candidate(ts: TraceSet, alpha: Fraction,
                     p: MergePartition) -> tuple[Topology, Verdict]:
    g = induce_topology(ts, p)
    return g, verify(ts, g, p.mapping(ts), alpha, limit=1)


def enumerate_inferrable(ts: TraceSet, alpha: Fraction, cap: int = DEFAULT_MAX_PARTITIONS,
                         max_stars: int = DEFAULT_MAX_STARS, workers: int = 1,
                         star_graph: StarGraph | None = None) -> Ensemble:
    """Visit every independent merge partition and keep those passing verification.

    At most ``cap`` candidate partitions are examined; ``truncated`` is set
    when more exist.  Output order does not depend on ``workers``.
    """
    s = len(ts.stars)
    if s > max_stars:
        raise LimitExceeded("max_stars", max_stars, s)
    if cap < 1:
        raise ValueError("cap must be positive")
    g = star_graph if star_graph is not None else build_star_graph(ts, alpha)

    it = iter_independent_partitions(g)
    candidates = list(islice(it, cap))
    truncated = next(it, None) is not None

    check = partial(_check_candidate, ts, alpha)
    if workers > 1 and len(candidates) > 1:
        chunk = max(1, len(candidates) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check, candidates, chunksize=chunk))
    else:
        results = [check(p) for p in candidates]

    kept_p, kept_g, rejected = [], [], []
    for p, (topo, verdict) in zip(candidates, results):
        if verdict.passed:
            kept_p.append(p)
            kept_g.append(topo)
        else:
            rejected.append((p, verdict.violations[0]))
    return Ensemble(ts, alpha, g, tuple(kept_p), tuple(kept_g), truncated,
                    len(candidates), tuple(rejected))


# -- Bell numbers --------------------------------------------------------------

def stirling2(s: int, j: int) -> int:
    """Ways to split s labelled items into j non-empty unlabelled blocks."""
    if s < 0 or j < 0:
        raise ValueError("arguments must be non-negative")
    total = sum((-1) ** l * comb(j, l) * (j - l) ** s for l in range(j + 1))
    return total // factorial(j)


def bell_number(s: int) -> int:
    if s < 0:
        raise ValueError("s must be non-negative")
    return sum(stirling2(s, j) for j in range(s + 1))


@lru_cache(maxsize=None)
def bell_triangle(s: int) -> int:
    """Bell number via the Aitken triangle (independent of the Stirling route)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    row = [1]
    for _ in range(s):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def canonic_partition(ts: TraceSet) -> MergePartition:
    return MergePartition.singletons(ts.stars)


def merge_pair(ts: TraceSet, a: int, b: int) -> MergePartition:
    """All stars separate except ``a`` and ``b``."""
    rest = tuple((x,) for x in ts.stars if x not in (a, b))
    return MergePartition(rest + ((a, b),))

