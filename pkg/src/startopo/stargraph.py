"""The conflict graph over stars, its chromatic number and chromatic polynomial."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, factorial
from typing import Iterable

from .canonic import INF, all_pairs_distances, build_canonic
from .traces import TraceSet, ceil_alpha, star_symbol

SAME_TRACE = "same-trace"
COND_I = "cond-i"
COND_II = "cond-ii"

DEFAULT_POLY_LIMIT = 15


class LimitExceeded(ValueError):
    def __init__(self, name: str, limit: int, actual: int):
        super().__init__(f"{name} limit exceeded: {actual} > {limit}")
        self.name = name
        self.limit = limit
        self.actual = actual


@dataclass(frozen=True)
class Justification:
    """Why two stars can never be the same router.

    ``witness`` is ``(star_a, star_b)`` for same-trace conflicts,
    ``(star, named)`` for condition (i) and ``(u, v)`` for condition (ii);
    ``required`` is the ceiling bound and ``actual`` the canonic distance
    (or distance sum) that falls short of it.
    """

    rule: str
    trace: int
    witness: tuple[str, str]
    required: int | None = None
    actual: int | None = None

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "trace": self.trace,
            "witness": list(self.witness),
            "required": self.required,
            "actual": self.actual,
        }


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class StarGraph:
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    justifications: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        verts = tuple(sorted(set(self.vertices)))
        edges = frozenset(_pair(a, b) for a, b in self.edges)
        vs = set(verts)
        for a, b in edges:
            if a == b or a not in vs or b not in vs:
                raise ValueError(f"bad star-graph edge ({a}, {b})")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "StarGraph":
        return cls(tuple(vertices), frozenset(edges))

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(n) for v, n in adj.items()}

    def adjacent(self, a: int, b: int) -> bool:
        return _pair(a, b) in self.edges

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {
                    "stars": list(e),
                    "justifications": [j.to_json() for j in self.justifications.get(e, ())],
                }
                for e in sorted(self.edges)
            ],
        }


def build_star_graph(ts: TraceSet, alpha: Fraction) -> StarGraph:
    """Conflict edges from co-occurrence and the two canonic-distance conditions.

    Condition (i): a trace holding star ``a`` places a named ``u`` so far
    away that ``ceil(alpha * d_T(a, u)) > d_C(u, b)``.  Condition (ii): some
    trace places named ``u, v`` so far apart that
    ``ceil(alpha * d_T(u, v)) > d_C(u, a) + d_C(v, b)``.  Only the first
    witness per rule is kept, in trace order.
    """
    canon = build_canonic(ts)
    dist = all_pairs_distances(canon, ts.named)
    stars = ts.stars
    found: dict[tuple[int, int], dict[str, Justification]] = {}

    def add(a: int, b: int, just: Justification) -> None:
        found.setdefault(_pair(a, b), {}).setdefault(just.rule, just)

    for ti, t in enumerate(ts.traces):
        tstars = t.stars
        for i, a in enumerate(tstars):
            for b in tstars[i + 1:]:
                add(a, b, Justification(SAME_TRACE, ti, (star_symbol(a), star_symbol(b))))

    # condition (i); each star lives in exactly one trace
    for a in stars:
        ti = ts.star_trace[a]
        t = ts.traces[ti]
        sa = star_symbol(a)
        for u in t.named:
            req = ceil_alpha(alpha, t.distance(sa, u))
            row = dist.row(u)
            for b in stars:
                if b != a and row.get(star_symbol(b), INF) < req:
                    add(a, b, Justification(COND_I, ti, (sa, u), req, row[star_symbol(b)]))

    # condition (ii)
    star_rows = {}
    for u in ts.named:
        row = dist.row(u)
        star_rows[u] = sorted(
            (row[star_symbol(b)], b) for b in stars if star_symbol(b) in row
        )
    for ti, t in enumerate(ts.traces):
        named = t.named
        for i, u in enumerate(named):
            for v in named[i + 1:]:
                req = ceil_alpha(alpha, t.distance(u, v))
                for x, y in ((u, v), (v, u)):
                    for dx, a in star_rows[x]:
                        if dx >= req:
                            break
                        for dy, b in star_rows[y]:
                            if dx + dy >= req:
                                break
                            if a != b:
                                add(a, b, Justification(COND_II, ti, (x, y), req, dx + dy))

    rule_order = {SAME_TRACE: 0, COND_I: 1, COND_II: 2}
    justs = {
        e: tuple(sorted(rules.values(), key=lambda j: rule_order[j.rule]))
        for e, rules in found.items()
    }
    return StarGraph(stars, frozenset(found), justs)


# -- chromatic number --------------------------------------------------------

def _index_graph(g: StarGraph) -> tuple[int, list[set[int]]]:
    index = {v: i for i, v in enumerate(g.vertices)}
    adj = [set() for _ in g.vertices]
    for a, b in g.edges:
        adj[index[a]].add(index[b])
        adj[index[b]].add(index[a])
    return len(g.vertices), adj


def _dsatur(n: int, adj: list[set[int]]) -> list[int]:
    colors = [-1] * n
    for _ in range(n):
        best = max(
            (v for v in range(n) if colors[v] < 0),
            key=lambda v: (len({colors[w] for w in adj[v] if colors[w] >= 0}), len(adj[v]), -v),
        )
        used = {colors[w] for w in adj[best]}
        c = 0
        while c in used:
            c += 1
        colors[best] = c
    return colors


def _greedy_clique(n: int, adj: list[set[int]]) -> int:
    best = 1 if n else 0
    for start in range(n):
        clique = [start]
        cand = set(adj[start])
        while cand:
            v = max(cand, key=lambda w: (len(adj[w] & cand), -w))
            clique.append(v)
            cand &= adj[v]
        best = max(best, len(clique))
    return best


def chromatic_number(g: StarGraph) -> int:
    """Exact chromatic number by DSATUR branch and bound."""
    n, adj = _index_graph(g)
    if n == 0:
        return 0
    upper = max(_dsatur(n, adj)) + 1
    lower = _greedy_clique(n, adj)
    if lower == upper:
        return upper

    best = upper
    colors = [-1] * n

    def search(colored: int, used: int) -> bool:
        nonlocal best
        if used >= best:
            return False
        if colored == n:
            best = used
            return best == lower
        v = max(
            (w for w in range(n) if colors[w] < 0),
            key=lambda w: (len({colors[x] for x in adj[w] if colors[x] >= 0}), len(adj[w])),
        )
        forbidden = {colors[x] for x in adj[v]}
        for c in range(min(used + 1, best - 1)):
            if c in forbidden:
                continue
            colors[v] = c
            if search(colored + 1, max(used, c + 1)):
                return True
        colors[v] = -1
        return False

    search(0, 0)
    return best


# -- chromatic polynomial ------------------------------------------------------

@dataclass(frozen=True)
class ChromaticPolynomial:
    """Integer coefficients, lowest power first."""

    coefficients: tuple[int, ...]

    def __call__(self, k: int) -> int:
        total = 0
        for c in reversed(self.coefficients):
            total = total * k + c
        return total

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __str__(self) -> str:
        terms = []
        for p in range(self.degree, -1, -1):
            c = self.coefficients[p]
            if c:
                mono = "" if p == 0 else ("k" if p == 1 else f"k^{p}")
                coef = str(c) if (abs(c) != 1 or p == 0) else ("-" if c < 0 else "")
                terms.append(f"{coef}{mono}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


def _padd(p: list[int], q: list[int]) -> list[int]:
    out = [0] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return out


def _psub(p: list[int], q: list[int]) -> list[int]:
    return _padd(p, [-c for c in q])


def _pmul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _falling(n: int) -> list[int]:
    # k (k-1) ... (k-n+1)
    out = [1]
    for i in range(n):
        out = _pmul(out, [-i, 1])
    return out


def _canon(n: int, edges: Iterable[tuple[int, int]]) -> tuple[int, frozenset]:
    return n, frozenset((a, b) if a < b else (b, a) for a, b in edges)


def _merge(n: int, edges: frozenset, u: int, v: int) -> tuple[int, frozenset]:
    """Identify v with u and relabel to 0..n-2."""
    def relabel(x: int) -> int:
        x = u if x == v else x
        return x - 1 if x > v else x
    merged = set()
    for a, b in edges:
        a, b = relabel(a), relabel(b)
        if a != b:
            merged.add((a, b) if a < b else (b, a))
    return n - 1, frozenset(merged)


def _drop_vertex(n: int, edges: frozenset, v: int) -> tuple[int, frozenset]:
    def relabel(x: int) -> int:
        return x - 1 if x > v else x
    return n - 1, frozenset((relabel(a), relabel(b)) for a, b in edges if v not in (a, b))


def _chrompoly(n: int, edges: frozenset, memo: dict) -> list[int]:
    key = (n, edges)
    if key in memo:
        return memo[key]
    m = len(edges)
    if m == 0:
        res = [0] * n + [1]
    elif m == n * (n - 1) // 2:
        res = _falling(n)
    else:
        deg = [0] * n
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        low = min(range(n), key=lambda x: deg[x])
        if deg[low] == 0:
            res = _pmul([0, 1], _chrompoly(*_drop_vertex(n, edges, low), memo))
        elif deg[low] == 1:
            res = _pmul([-1, 1], _chrompoly(*_drop_vertex(n, edges, low), memo))
        elif 2 * m > n * (n - 1) // 2:
            # dense: P(G) = P(G + e) + P(G / e) for a non-edge e
            u, v = next(
                (a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in edges
            )
            res = _padd(
                _chrompoly(n, edges | {(u, v)}, memo),
                _chrompoly(*_merge(n, edges, u, v), memo),
            )
        else:
            u, v = next(e for e in sorted(edges) if low in e)
            res = _psub(
                _chrompoly(n, edges - {(u, v)}, memo),
                _chrompoly(*_merge(n, edges, u, v), memo),
            )
    res = res + [0] * (n + 1 - len(res))
    memo[key] = res
    return res


def chromatic_polynomial(g: StarGraph, limit: int = DEFAULT_POLY_LIMIT) -> ChromaticPolynomial:
    """Number of proper colourings using at most k colours, as a polynomial in k."""
    n = len(g.vertices)
    if n > limit:
        raise LimitExceeded("max_poly_vertices", limit, n)
    index = {v: i for i, v in enumerate(g.vertices)}
    key = _canon(n, ((index[a], index[b]) for a, b in g.edges))
    coeffs = _chrompoly(*key, {})
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return ChromaticPolynomial(tuple(coeffs))


def surjective_colorings(poly: ChromaticPolynomial, k: int) -> int:
    """Proper colourings using exactly k colours (inclusion-exclusion)."""
    return sum((-1) ** (k - j) * comb(k, j) * poly(j) for j in range(k + 1))


def counting_upper_bound(g: StarGraph, exact_colors: bool = False,
                         limit: int = DEFAULT_POLY_LIMIT) -> Fraction:
    """Upper bound on the number of inferrable topologies.

    Sums ``P(k) / k!`` over palette sizes from the chromatic number to the
    number of stars, where ``P`` is the chromatic polynomial (colourings
    with at most k colours).  With ``exact_colors`` each term instead
    counts colourings using all k colours, so the sum becomes the number of
    partitions of the stars into independent sets: the sharpest bound an
    enumeration over colour classes can give, and the Bell number when
    there are no conflicts.
    """
    poly = chromatic_polynomial(g, limit)
    n = len(g.vertices)
    if n == 0:
        return Fraction(1)
    chi = chromatic_number(g)
    total = Fraction(0)
    for k in range(chi, n + 1):
        count = surjective_colorings(poly, k) if exact_colors else poly(k)
        total += Fraction(count, factorial(k))
    return total
