"""Checking a (topology, mapping) pair against the inference axioms.

Axiom 0: every edge of the topology is a mapped hop of some trace.
Axiom 1: each trace maps to a simple path (distinct images, consecutive
images adjacent).
Axiom 2: for every pair of symbols in a trace, the topology distance is at
least ``ceil(alpha * d_T)``.

The trace-merging axiom follows from Axiom 1 and is not checked separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .canonic import INF, Topology, all_pairs_distances, edge_key
from .traces import TraceSet, ceil_alpha, is_star

DEFAULT_VIOLATION_LIMIT = 100


class MappingError(ValueError):
    """The mapping is not a valid symbol-to-node assignment for the topology."""


@dataclass(frozen=True)
class Violation:
    axiom: int
    trace: int | None
    pair: tuple[str, ...]
    required: int | None = None
    actual: float | None = None
    note: str = ""

    def to_json(self) -> dict:
        actual = self.actual
        if actual == INF:
            actual = "inf"
        return {
            "axiom": self.axiom,
            "trace": self.trace,
            "pair": list(self.pair),
            "required": self.required,
            "actual": actual,
            "note": self.note,
        }


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Violation, ...] = ()
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def first(self, axiom: int) -> Violation | None:
        return next((v for v in self.violations if v.axiom == axiom), None)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "truncated": self.truncated,
            "violations": [v.to_json() for v in self.violations],
        }


def identity_mapping(ts: TraceSet) -> dict[str, str]:
    return {s: s for s in ts.symbols}


def check_mapping(ts: TraceSet, g: Topology, mapping: Mapping[str, str]) -> None:
    missing = [s for s in ts.symbols if s not in mapping]
    if missing:
        raise MappingError(f"mapping is not total; missing {missing[:5]}")
    for s in ts.symbols:
        node = mapping[s]
        if node not in g.nodes:
            raise MappingError(f"{s!r} maps to unknown node {node!r}")
        if is_star(s):
            if node not in g.anonymous:
                raise MappingError(f"star {s!r} maps to named node {node!r}")
        elif node != s or node in g.anonymous:
            raise MappingError(f"named symbol {s!r} must map to the named node {s!r}")
    image = {mapping[s] for s in ts.symbols}
    if image != set(g.nodes):
        extra = sorted(set(g.nodes) - image)
        raise MappingError(f"mapping is not surjective; unmapped nodes {extra[:5]}")


def verify(ts: TraceSet, g: Topology, mapping: Mapping[str, str], alpha: Fraction,
           limit: int = DEFAULT_VIOLATION_LIMIT) -> Verdict:
    """Collect axiom violations (up to ``limit``) for ``g`` under ``mapping``."""
    check_mapping(ts, g, mapping)
    violations: list[Violation] = []
    truncated = False

    def report(v: Violation) -> bool:
        nonlocal truncated
        if len(violations) >= limit:
            truncated = True
            return False
        violations.append(v)
        return True

    traced = set()
    for t in ts.traces:
        for a, b in t.hops():
            ma, mb = mapping[a], mapping[b]
            if ma != mb:
                traced.add(edge_key(ma, mb))
    for u, v in sorted(g.edges - traced):
        if not report(Violation(0, None, (u, v), note="edge appears in no trace")):
            return Verdict(tuple(violations), truncated)

    for ti, t in enumerate(ts.traces):
        images = [mapping[s] for s in t.symbols]
        first_at: dict[str, int] = {}
        for i, node in enumerate(images):
            if node in first_at:
                j = first_at[node]
                if not report(Violation(1, ti, (t.symbols[j], t.symbols[i]),
                                        note=f"both map to {node}")):
                    return Verdict(tuple(violations), truncated)
            else:
                first_at[node] = i
        for i in range(len(images) - 1):
            if images[i] != images[i + 1] and edge_key(images[i], images[i + 1]) not in g.edges:
                if not report(Violation(1, ti, (t.symbols[i], t.symbols[i + 1]),
                                        note="consecutive images are not adjacent")):
                    return Verdict(tuple(violations), truncated)

    dist = all_pairs_distances(g, {mapping[s] for s in ts.symbols})
    for ti, t in enumerate(ts.traces):
        syms = t.symbols
        for i in range(len(syms)):
            row = dist.row(mapping[syms[i]])
            for j in range(i + 1, len(syms)):
                req = ceil_alpha(alpha, j - i)
                actual = row.get(mapping[syms[j]], INF)
                if actual < req:
                    if not report(Violation(2, ti, (syms[i], syms[j]), req, actual)):
                        return Verdict(tuple(violations), truncated)
    return Verdict(tuple(violations), truncated)


def effective_alpha(ts: TraceSet, g: Topology, mapping: Mapping[str, str]) -> Fraction:
    """Smallest ratio of topology distance to trace distance over all trace pairs.

    Not clamped to 1.  Raises if some pair in a trace has disconnected images.
    """
    check_mapping(ts, g, mapping)
    dist = all_pairs_distances(g, {mapping[s] for s in ts.symbols})
    best: Fraction | None = None
    for ti, t in enumerate(ts.traces):
        syms = t.symbols
        for i in range(len(syms)):
            row = dist.row(mapping[syms[i]])
            for j in range(i + 1, len(syms)):
                d = row.get(mapping[syms[j]])
                if d is None:
                    raise ValueError(
                        f"trace {ti}: images of {syms[i]!r} and {syms[j]!r} are disconnected"
                    )
                ratio = Fraction(d, j - i)
                if best is None or ratio < best:
                    best = ratio
    return Fraction(1) if best is None else best


def load_mapping(obj: Mapping) -> dict[str, str]:
    if not isinstance(obj, Mapping):
        raise ValueError("mapping JSON must be an object of symbol -> label")
    return {str(k): str(v) for k, v in obj.items()}
