"""Trace sets: the symbol alphabet, parsing, validation and per-trace distances.

Symbols are plain strings.  A named symbol is its identifier (``"u"``,
``"10.0.0.1"``); a star is ``"*<id>"`` with a positive integer id that is
unique across the whole trace set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Union

STAR = "*"

_NAMED_RE = re.compile(r"[A-Za-z0-9_.:-]+\Z")
_STAR_RE = re.compile(r"\*(\d*)\Z")
_ALPHA_RE = re.compile(r"\s*(\d+)\s*(?:/\s*(\d+)\s*)?\Z")


class TraceFormatError(ValueError):
    """Raised for malformed trace input."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def is_star(symbol: str) -> bool:
    return symbol.startswith(STAR)


def star_symbol(star: int) -> str:
    return f"{STAR}{star}"


def star_id(symbol: str) -> int:
    m = _STAR_RE.match(symbol)
    if not m or not m.group(1):
        raise ValueError(f"not a numbered star: {symbol!r}")
    return int(m.group(1))


def _check_named(token: str) -> None:
    if not _NAMED_RE.match(token):
        raise TraceFormatError(f"malformed token {token!r}")


def symbol_sort_key(symbol: str) -> tuple:
    """Named symbols first (lexicographic), then stars by numeric id."""
    if is_star(symbol):
        return (1, star_id(symbol), "")
    return (0, 0, symbol)


@dataclass(frozen=True)
class Trace:
    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(symbols) < 2:
            raise TraceFormatError("trace needs at least two symbols")
        for sym in symbols:
            if is_star(sym):
                if star_id(sym) < 1:
                    raise TraceFormatError(f"star ids must be positive: {sym!r}")
            else:
                _check_named(sym)
        if is_star(symbols[0]) or is_star(symbols[-1]):
            raise TraceFormatError("trace must start and end with a named node")
        if len(set(symbols)) != len(symbols):
            dup = next(s for s in symbols if symbols.count(s) > 1)
            raise TraceFormatError(f"symbol {dup!r} occurs twice in one trace")

    @cached_property
    def positions(self) -> dict[str, int]:
        return {sym: i for i, sym in enumerate(self.symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.positions

    @property
    def stars(self) -> tuple[int, ...]:
        return tuple(star_id(s) for s in self.symbols if is_star(s))

    @property
    def named(self) -> tuple[str, ...]:
        return tuple(s for s in self.symbols if not is_star(s))

    def distance(self, a: str, b: str) -> int:
        try:
            return abs(self.positions[a] - self.positions[b])
        except KeyError as exc:
            raise KeyError(f"symbol {exc.args[0]!r} not in trace") from None

    def hops(self) -> Iterator[tuple[str, str]]:
        return zip(self.symbols, self.symbols[1:])

    def __str__(self) -> str:
        return " ".join(self.symbols)


def trace_distance(trace: Trace, a: str, b: str) -> int:
    return trace.distance(a, b)


@dataclass(frozen=True)
class TraceSetStats:
    n: int
    s: int
    nu: int

    @property
    def N(self) -> int:
        return self.n + self.s

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s, "N": self.N, "nu": self.nu}


@dataclass(frozen=True)
class TraceSet:
    traces: tuple[Trace, ...] = ()

    def __post_init__(self) -> None:
        traces = tuple(t if isinstance(t, Trace) else Trace(tuple(t)) for t in self.traces)
        object.__setattr__(self, "traces", traces)
        seen: set[int] = set()
        for t in traces:
            for sid in t.stars:
                if sid in seen:
                    raise TraceFormatError(f"star id {sid} used more than once")
                seen.add(sid)

    @classmethod
    def from_lists(cls, traces: Iterable[Iterable[str]]) -> "TraceSet":
        return cls(tuple(Trace(tuple(t)) for t in traces))

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    @cached_property
    def named(self) -> tuple[str, ...]:
        return tuple(sorted({s for t in self.traces for s in t.named}))

    @cached_property
    def stars(self) -> tuple[int, ...]:
        return tuple(sorted(sid for t in self.traces for sid in t.stars))

    @cached_property
    def symbols(self) -> tuple[str, ...]:
        return self.named + tuple(star_symbol(i) for i in self.stars)

    @cached_property
    def star_trace(self) -> dict[int, int]:
        """Index of the (single) trace holding each star."""
        return {sid: i for i, t in enumerate(self.traces) for sid in t.stars}

    @cached_property
    def stats(self) -> TraceSetStats:
        named_pairs = {
            frozenset(hop)
            for t in self.traces
            for hop in t.hops()
            if not (is_star(hop[0]) or is_star(hop[1]))
        }
        return TraceSetStats(n=len(self.named), s=len(self.stars), nu=len(named_pairs))

    def next_star_id(self) -> int:
        return max(self.stars, default=0) + 1


def parse_trace_set(text: Union[str, bytes]) -> TraceSet:
    """Parse the ``.traces`` text format.

    Bare ``*`` tokens are numbered 1, 2, ... in reading order; explicit
    ``*k`` ids are kept.  A file must use one scheme or the other.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceFormatError(f"input is not UTF-8: {exc}") from None

    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            rows.append((lineno, tokens))

    bare = explicit = False
    for lineno, tokens in rows:
        for tok in tokens:
            m = _STAR_RE.match(tok)
            if m:
                if m.group(1):
                    explicit = True
                else:
                    bare = True
            elif tok.startswith(STAR):
                raise TraceFormatError(f"malformed star token {tok!r}", lineno)
            elif not _NAMED_RE.match(tok):
                raise TraceFormatError(f"malformed token {tok!r}", lineno)
    if bare and explicit:
        raise TraceFormatError("cannot mix bare '*' and numbered '*k' stars in one file")

    counter = 0
    seen: set[int] = set()
    traces = []
    for lineno, tokens in rows:
        symbols = []
        for tok in tokens:
            if tok == STAR:
                counter += 1
                tok = star_symbol(counter)
            elif is_star(tok):
                sid = int(tok[1:])
                if sid < 1:
                    raise TraceFormatError(f"star ids must be positive: {tok!r}", lineno)
                if sid in seen:
                    raise TraceFormatError(f"duplicate star id {sid}", lineno)
                seen.add(sid)
                tok = star_symbol(sid)
            symbols.append(tok)
        try:
            traces.append(Trace(tuple(symbols)))
        except TraceFormatError as exc:
            raise TraceFormatError(str(exc), lineno) from None
    return TraceSet(tuple(traces))


def serialize_trace_set(ts: TraceSet) -> str:
    return "".join(str(t) + "\n" for t in ts.traces)


# -- routing consistency ---------------------------------------------------

def as_alpha(value: Union[Fraction, int, str]) -> Fraction:
    """Validate a routing-consistency parameter in (0, 1].

    Strings must be ``"p/q"`` or an integer; decimals are rejected so that
    no rounding can sneak in.
    """
    if isinstance(value, str):
        m = _ALPHA_RE.match(value)
        if not m:
            raise ValueError(f"alpha must be 'p/q' or an integer, got {value!r}")
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise ValueError("alpha denominator is zero")
        alpha = Fraction(num, den)
    elif isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        alpha = Fraction(value)
    else:
        raise TypeError(f"alpha must be a Fraction, int or str, not {type(value).__name__}")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def ceil_alpha(alpha: Fraction, k: int) -> int:
    """Exact ``ceil(alpha * k)`` in integer arithmetic."""
    if k < 0:
        raise ValueError("hop count must be non-negative")
    return -((-alpha.numerator * k) // alpha.denominator)
