"""Per-topology metrics, ensemble bound audits and full-exploration checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .canonic import Topology, bfs, build_canonic, components
from .enumeration import Ensemble
from .stargraph import chromatic_number
from .traces import TraceSet, TraceSetStats

METRICS = ("node_count", "edge_count", "components", "diameter", "max_degree", "triangle_count")


@dataclass(frozen=True)
class MetricRecord:
    node_count: int
    edge_count: int
    components: int
    diameter: int
    disconnected: bool
    max_degree: int
    triangle_count: int
    stretch: Fraction | None = None
    stretch_disconnected: bool = False

    def to_json(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "components": self.components,
            "diameter": self.diameter,
            "disconnected": self.disconnected,
            "max_degree": self.max_degree,
            "triangle_count": self.triangle_count,
            "stretch": None if self.stretch is None else str(self.stretch),
            "stretch_disconnected": self.stretch_disconnected,
        }


def triangle_count(g: Topology) -> int:
    order = {x: i for i, x in enumerate(sorted(g.nodes))}
    adj = {x: {y for y in nbrs if order[y] > order[x]} for x, nbrs in g.adjacency.items()}
    total = 0
    for u, v in g.edges:
        a, b = (u, v) if order[u] < order[v] else (v, u)
        total += len(adj[a] & adj[b])
    return total


def _named_distances(g: Topology) -> dict[str, dict[str, int]]:
    return {u: bfs(g.adjacency, u) for u in sorted(g.named)}


def stretch(g: Topology, reference: Topology) -> tuple[Fraction | None, bool]:
    """Worst distance distortion over named pairs, and whether some pair is
    connected in only one of the two graphs (the stretch is then undefined)."""
    missing = g.named - reference.named
    if missing:
        raise ValueError(f"reference lacks named node(s) {sorted(missing)[:5]}")
    dg = _named_distances(g)
    dr = {u: bfs(reference.adjacency, u) for u in dg}
    worst: Fraction | None = None
    for u, v in combinations(sorted(dg), 2):
        a, b = dg[u].get(v), dr[u].get(v)
        if (a is None) != (b is None):
            return None, True
        if a is None:
            continue
        r = max(Fraction(a, b), Fraction(b, a))
        if worst is None or r > worst:
            worst = r
    return worst, False


def measure(g: Topology, reference: Topology | None = None) -> MetricRecord:
    adj = g.adjacency
    diameter = 0
    for x in g.nodes:
        ecc = max(bfs(adj, x).values())
        diameter = max(diameter, ecc)
    ncomp = len(components(g))
    rho, partial = (None, False) if reference is None else stretch(g, reference)
    return MetricRecord(
        node_count=len(g.nodes),
        edge_count=len(g.edges),
        components=ncomp,
        diameter=diameter,
        disconnected=ncomp > 1,
        max_degree=max((len(n) for n in adj.values()), default=0),
        triangle_count=triangle_count(g),
        stretch=rho,
        stretch_disconnected=partial,
    )


# -- full exploration ----------------------------------------------------------

@dataclass(frozen=True)
class FullExploration:
    fully_explored: bool
    missing: tuple[tuple[str, str], ...]

    def __bool__(self) -> bool:
        return self.fully_explored

    def to_json(self) -> dict:
        return {"fully_explored": self.fully_explored, "missing": [list(p) for p in self.missing]}


def _covered_pairs(ts: TraceSet) -> set[tuple[str, str]]:
    covered = set()
    for t in ts.traces:
        covered.update(combinations(sorted(t.named), 2))
    return covered


def uncovered_pairs(ts: TraceSet, g: Topology) -> list[tuple[str, str]]:
    """Named pairs sharing a component of ``g`` but no trace."""
    covered = _covered_pairs(ts)
    missing = []
    for comp in components(g):
        named = sorted(x for x in comp if x not in g.anonymous)
        missing.extend(p for p in combinations(named, 2) if p not in covered)
    return sorted(missing)


def is_fully_explored(ts: TraceSet) -> FullExploration:
    missing = uncovered_pairs(ts, build_canonic(ts))
    return FullExploration(not missing, tuple(missing))


# -- bound audit ---------------------------------------------------------------

@dataclass(frozen=True)
class AuditRow:
    metric: str
    measure: str
    scope: str
    observed: Fraction | None
    bound: Fraction | None
    verdict: str

    @property
    def tight(self) -> bool:
        return self.observed is not None and self.bound is not None and self.observed == self.bound

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "measure": self.measure,
            "scope": self.scope,
            "observed": None if self.observed is None else str(self.observed),
            "bound": None if self.bound is None else str(self.bound),
            "verdict": self.verdict,
            "tight": self.tight,
        }


@dataclass(frozen=True)
class BoundAudit:
    rows: tuple[AuditRow, ...]
    members: int
    explored_members: int

    @property
    def passed(self) -> bool:
        return all(r.verdict != "violated" for r in self.rows)

    def row(self, metric: str, measure: str, scope: str = "arbitrary") -> AuditRow:
        for r in self.rows:
            if (r.metric, r.measure, r.scope) == (metric, measure, scope):
                return r
        raise KeyError((metric, measure, scope))

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "members": self.members,
            "explored_members": self.explored_members,
            "rows": [r.to_json() for r in self.rows],
        }


def _spread(values: Sequence[int]) -> tuple[Fraction | None, Fraction | None]:
    if not values:
        return None, None
    lo, hi = min(values), max(values)
    return Fraction(hi - lo), (Fraction(hi, lo) if lo else None)


def _row(metric: str, measure: str, scope: str, observed, bound) -> AuditRow:
    if observed is None:
        verdict = "skipped"
    elif bound is None:
        verdict = "unaudited"
    else:
        verdict = "within" if observed <= bound else "violated"
    return AuditRow(metric, measure, scope, observed, bound, verdict)


def _stretch_spread(topologies: Sequence[Topology]) -> Fraction | None:
    """Largest distance ratio for a named pair between two members where it is connected."""
    lo: dict[tuple[str, str], int] = {}
    hi: dict[tuple[str, str], int] = {}
    for g in topologies:
        named = g.named
        for u, row in _named_distances(g).items():
            for v, d in row.items():
                if u < v and v in named:
                    key = (u, v)
                    lo[key] = min(lo.get(key, d), d)
                    hi[key] = max(hi.get(key, d), d)
    if not topologies:
        return None
    return max((Fraction(hi[k], lo[k]) for k in lo), default=Fraction(1))


def audit_ensemble(ensemble: Ensemble, stats: TraceSetStats | None = None,
                   chi: int | None = None, fully_explored: bool | None = None,
                   records: Sequence[MetricRecord] | None = None) -> BoundAudit:
    """Compare the spread of every metric over the ensemble with the known bounds.

    Fully-explored bounds are only applied at ``alpha = 1`` and only to the
    members whose own same-component named pairs are all covered by a trace.
    """
    if len(ensemble) == 0:
        raise ValueError("cannot audit an empty ensemble")
    ts = ensemble.traces
    stats = stats or ts.stats
    chi = chromatic_number(ensemble.star_graph) if chi is None else chi
    if fully_explored is None:
        fully_explored = bool(is_fully_explored(ts))
    if records is None:
        records = [measure(g) for g in ensemble.topologies]
    n, s, N, nu = stats.n, stats.s, stats.N, stats.nu

    def col(name: str, recs=records) -> list[int]:
        return [getattr(r, name) for r in recs]

    rows = []
    scope = "arbitrary"
    for metric, diff_bound, ratio_bound in (
        ("node_count", Fraction(s - chi), Fraction(n + s, n + chi) if n + chi else None),
        # with no stars there is a single member, and the ratio formula dips below 1
        ("edge_count", Fraction(2 * (s - chi)), Fraction(nu + 2 * s, nu + 2) if s else Fraction(1)),
        ("components", Fraction(n, 2), Fraction(n, 2) if n >= 2 else Fraction(1)),
        ("max_degree", Fraction(2 * (s - chi)), Fraction(s - chi + 1)),
        ("triangle_count", Fraction(2 * s * (s - 1)), None),
    ):
        diff, ratio = _spread(col(metric))
        rows.append(_row(metric, "difference", scope, diff, diff_bound))
        rows.append(_row(metric, "ratio", scope, ratio, ratio_bound))

    connected = [r for r in records if not r.disconnected]
    diff, ratio = _spread(col("diameter", connected))
    rows.append(_row("diameter", "difference", scope, diff,
                     Fraction((s - 1) * (N - 1), s) if s else Fraction(0)))
    rows.append(_row("diameter", "ratio", scope, ratio, Fraction(max(s, 1))))
    rows.append(_row("stretch", "ratio", scope, _stretch_spread(ensemble.topologies),
                     Fraction(N - 1, 2) if N > 2 else Fraction(1)))

    explored = list(range(len(ensemble)))
    if fully_explored and ensemble.alpha == 1:
        scope = "fully-explored"
        explored = [i for i, g in enumerate(ensemble.topologies) if not uncovered_pairs(ts, g)]
        recs = [records[i] for i in explored]
        diff, ratio = _spread(col("components", recs))
        rows.append(_row("components", "difference", scope, diff, Fraction(0)))
        rows.append(_row("components", "ratio", scope, ratio, Fraction(1)))
        rows.append(_row("stretch", "ratio", scope,
                         _stretch_spread([ensemble.topologies[i] for i in explored]),
                         Fraction(1)))
        conn = [r for r in recs if not r.disconnected]
        diff, ratio = _spread(col("diameter", conn))
        rows.append(_row("diameter", "ratio", scope, ratio, Fraction(2)))
        lower = Fraction(s, 2)
        rows.append(AuditRow("diameter", "difference-example", scope, diff, lower,
                             "skipped" if diff is None else
                             ("achieved" if diff >= lower else "not-achieved")))
        diff, _ = _spread(col("triangle_count", recs))
        rows.append(_row("triangle_count", "difference", scope, diff, Fraction(s * (s - 1))))

    return BoundAudit(tuple(rows), len(ensemble), len(explored))


def ranges(records: Sequence[MetricRecord]) -> dict[str, list[int]]:
    return {
        m: [min(getattr(r, m) for r in records), max(getattr(r, m) for r in records)]
        for m in METRICS
    } if records else {}
