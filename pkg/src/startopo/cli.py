"""Command-line front end.

Exit status: 0 on success or a passing check, 1 when a check, exploration
test or audit fails, 2 on usage or input errors.  JSON output always has
sorted keys, so identical inputs and flags give byte-identical reports.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from random import Random
from typing import Any, Sequence

from . import __version__
from .axioms import effective_alpha, load_mapping, verify
from .canonic import Topology, build_canonic
from .enumeration import (DEFAULT_MAX_PARTITIONS, DEFAULT_MAX_STARS, bell_number,
                          enumerate_inferrable)
from .generators import (GroundTruth, gen_diameter_chain, gen_fullexp_diameter,
                         gen_fullexp_triangles, gen_star_network, gen_triangle_ratio,
                         make_fully_explored, random_ground_truth, realize_star_graph,
                         sample_traces)
from .metrics import METRICS, audit_ensemble, is_fully_explored, measure, ranges
from .stargraph import (DEFAULT_POLY_LIMIT, LimitExceeded, build_star_graph,
                        chromatic_number, chromatic_polynomial, counting_upper_bound)
from .traces import TraceSet, as_alpha, parse_trace_set, serialize_trace_set

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: Fraction = Fraction(1)
    max_partitions: int = DEFAULT_MAX_PARTITIONS
    max_stars: int = DEFAULT_MAX_STARS
    fmt: str = "json"
    seed: int = 0
    workers: int = 1
    output: str | None = None

    def __post_init__(self) -> None:
        if self.max_partitions < 1 or self.max_stars < 0 or self.workers < 1:
            raise InputError("limits and worker count must be positive")

    def header(self) -> dict:
        return {
            "command": self.command,
            "alpha": str(self.alpha),
            "max_partitions": self.max_partitions,
            "max_stars": self.max_stars,
            "seed": self.seed,
            "version": __version__,
        }


# -- output helpers --------------------------------------------------------------

def dumps(obj: Any, lines: bool = False) -> str:
    if lines:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return json.dumps(obj, sort_keys=True, indent=2)


def table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(h) for h in headers]] + [["" if c is None else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    out = []
    for k, r in enumerate(cells):
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out)


def key_values(pairs: Sequence[tuple[str, Any]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in pairs)


def emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def read_traces(path: str) -> TraceSet:
    try:
        data = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_trace_set(data)


def read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# -- subcommands -----------------------------------------------------------------

def cmd_validate(args, cfg: RunConfig) -> int:
    ts = read_traces(args.traces)
    st = ts.stats
    if cfg.fmt == "text":
        emit(cfg, key_values([("traces", len(ts)), ("named", st.n), ("stars", st.s),
                              ("links", st.nu), ("symbols", st.N)]))
    else:
        emit(cfg, dumps({"config": cfg.header(), "valid": True, "traces": len(ts),
                         "stats": st.to_json()}))
    return EXIT_OK


def cmd_canonic(args, cfg: RunConfig) -> int:
    g = build_canonic(read_traces(args.traces))
    if cfg.fmt == "text":
        emit(cfg, table(["u", "v"], sorted(g.edges)))
    else:
        emit(cfg, dumps(g.to_json()))
    return EXIT_OK


def _star_summary(g, limit: int) -> dict:
    chi = chromatic_number(g)
    try:
        poly = str(chromatic_polynomial(g, limit))
        bound = counting_upper_bound(g, limit=limit)
        partitions = counting_upper_bound(g, exact_colors=True, limit=limit)
    except LimitExceeded:
        poly, bound, partitions = None, None, None
    return {"chromatic_number": chi, "chromatic_polynomial": poly,
            "counting_bound": None if bound is None else str(bound),
            "independent_partitions": None if partitions is None else int(partitions)}


def cmd_stars(args, cfg: RunConfig) -> int:
    ts = read_traces(args.traces)
    g = build_star_graph(ts, cfg.alpha)
    summary = _star_summary(g, args.poly_limit)
    if cfg.fmt == "text":
        rows = [(a, b, ",".join(j.rule for j in g.justifications.get((a, b), ())))
                for a, b in sorted(g.edges)]
        emit(cfg, key_values([("vertices", len(g.vertices)), ("edges", len(g.edges)),
                              ("chromatic number", summary["chromatic_number"]),
                              ("counting bound", summary["counting_bound"])])
             + "\n\n" + table(["a", "b", "rule"], rows))
    else:
        emit(cfg, dumps({"config": cfg.header(), "star_graph": g.to_json(), **summary}))
    return EXIT_OK


def _enumerate(ts: TraceSet, cfg: RunConfig):
    return enumerate_inferrable(ts, cfg.alpha, cap=cfg.max_partitions,
                                max_stars=cfg.max_stars, workers=cfg.workers)


def cmd_enumerate(args, cfg: RunConfig) -> int:
    ts = read_traces(args.traces)
    ens = _enumerate(ts, cfg)
    records = [measure(g) for g in ens.topologies]
    summary = {
        "count": len(ens),
        "candidates": ens.candidates,
        "rejected": len(ens.rejected),
        "truncated": ens.truncated,
        **_star_summary(ens.star_graph, DEFAULT_POLY_LIMIT),
        "bell_reference": bell_number(len(ts.stars)) if not ens.star_graph.edges else None,
    }
    if cfg.fmt == "text":
        rows = [(i, " ".join(p.labels) or "-", rec.node_count, rec.edge_count, rec.diameter)
                for i, ((p, _), rec) in enumerate(zip(ens, records))]
        emit(cfg, table(["#", "blocks", "nodes", "edges", "diam"], rows) + "\n\n"
             + key_values([(k, summary[k]) for k in sorted(summary)]))
        return EXIT_OK
    lines = [dumps({"config": cfg.header()}, lines=True)]
    for i, ((p, g), rec) in enumerate(zip(ens, records)):
        lines.append(dumps({"index": i, "partition": p.to_json(), "labels": list(p.labels),
                            "edges": [list(e) for e in sorted(g.edges)],
                            "metrics": rec.to_json()}, lines=True))
    if args.rejected:
        for p, v in ens.rejected:
            lines.append(dumps({"rejected": p.to_json(), "violation": v.to_json()}, lines=True))
    lines.append(dumps({"summary": summary}, lines=True))
    emit(cfg, "\n".join(lines))
    return EXIT_OK


def _write_csv(records, path: Path) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", *METRICS, "stretch"])
        for i, r in enumerate(records):
            w.writerow([i, *(getattr(r, m) for m in METRICS),
                        "" if r.stretch is None else str(r.stretch)])
    return path


def cmd_metrics(args, cfg: RunConfig) -> int:
    ts = read_traces(args.traces)
    reference = Topology.from_json(read_json(args.reference)) if args.reference else None
    ens = _enumerate(ts, cfg)
    records = [measure(g, reference) for g in ens.topologies]
    explored = is_fully_explored(ts)
    audit = audit_ensemble(ens, ts.stats, fully_explored=bool(explored), records=records)
    report = {
        "config": cfg.header(),
        "per_topology": [r.to_json() for r in records],
        "ranges": ranges(records),
        "audit": audit.to_json(),
        "fully_explored": explored.fully_explored,
        "truncated": ens.truncated,
    }
    if args.figures:
        from .plotting import write_figures

        outdir = Path(args.figures)
        paths = write_figures(records, audit, outdir)
        paths.append(_write_csv(records, outdir / "metrics.csv"))
        report["figures"] = [str(p) for p in paths]
    if cfg.fmt == "text":
        rows = [(r.metric, r.measure, r.scope, r.observed, r.bound, r.verdict) for r in audit.rows]
        emit(cfg, table(["metric", "measure", "scope", "observed", "bound", "verdict"], rows))
    else:
        emit(cfg, dumps(report))
    return EXIT_OK if audit.passed else EXIT_FAIL


def cmd_check(args, cfg: RunConfig) -> int:
    ts = read_traces(args.traces)
    g = Topology.from_json(read_json(args.topology))
    mapping = load_mapping(read_json(args.mapping))
    verdict = verify(ts, g, mapping, cfg.alpha, limit=args.limit)
    out = {"config": cfg.header(), **verdict.to_json()}
    try:
        out["effective_alpha"] = str(effective_alpha(ts, g, mapping))
    except ValueError:
        out["effective_alpha"] = None
    if cfg.fmt == "text":
        rows = [(v.axiom, v.trace, " ".join(v.pair), v.required, v.actual, v.note)
                for v in verdict.violations]
        emit(cfg, f"passed: {verdict.passed}\n"
             + (table(["axiom", "trace", "pair", "required", "actual", "note"], rows) if rows else ""))
    else:
        emit(cfg, dumps(out))
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_fullexp(args, cfg: RunConfig) -> int:
    res = is_fully_explored(read_traces(args.traces))
    if cfg.fmt == "text":
        emit(cfg, f"fully explored: {res.fully_explored}\n"
             + "".join(f"missing {u} {v}\n" for u, v in res.missing))
    else:
        emit(cfg, dumps({"config": cfg.header(), **res.to_json()}))
    return EXIT_OK if res.fully_explored else EXIT_FAIL


def _parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) != 2 or not all(parts):
            raise InputError(f"bad pair {item!r}; expected a:b")
        pairs.append((parts[0], parts[1]))
    return pairs


def _random_graph(rng: Random, n: int) -> tuple[list[int], list[tuple[int, int]]]:
    verts = list(range(1, n + 1))
    edges = [(a, b) for a in verts for b in verts if a < b and rng.random() < 0.5]
    return verts, edges


def cmd_gen(args, cfg: RunConfig) -> int:
    kind = args.kind
    if kind == "star":
        gt = gen_star_network(args.s)
    elif kind == "diam-chain":
        gt = gen_diameter_chain(args.s, args.x)
    elif kind == "realize":
        if args.graph:
            obj = read_json(args.graph)
            verts, edges = obj["vertices"], [tuple(e) for e in obj["edges"]]
        else:
            verts, edges = _random_graph(Random(cfg.seed), args.vertices)
        gt = realize_star_graph(verts, edges, cfg.alpha)
    elif kind == "fe-diam":
        gt = gen_fullexp_diameter(args.k)
    elif kind == "fe-tri":
        gt = gen_triangle_ratio() if args.ratio_variant else gen_fullexp_triangles(args.s)
    else:
        if args.topology:
            g0 = Topology.from_json(read_json(args.topology))
            if not args.pairs:
                raise InputError("--pairs is required with --topology")
            gt = sample_traces(g0, _parse_pairs(args.pairs), cfg.alpha, cfg.seed)
        else:
            gt = random_ground_truth(cfg.seed, args.max_nodes, args.anon_frac,
                                     args.max_pairs, cfg.alpha)
    if args.fully_explored or args.preserve_degrees:
        gt = make_fully_explored(gt, preserve_degrees=args.preserve_degrees)
    return _write_ground_truth(gt, cfg)


def _write_ground_truth(gt: GroundTruth, cfg: RunConfig) -> int:
    traces = serialize_trace_set(gt.traces)
    mapping = dict(sorted(gt.mapping.items()))
    if cfg.output:
        prefix = cfg.output
        Path(prefix + ".traces").write_text(traces)
        Path(prefix + ".topology.json").write_text(dumps(gt.topology.to_json()) + "\n")
        Path(prefix + ".mapping.json").write_text(dumps(mapping) + "\n")
        sys.stderr.write(f"wrote {prefix}.traces, {prefix}.topology.json and {prefix}.mapping.json\n")
    elif cfg.fmt == "text":
        sys.stdout.write(traces)
    else:
        sys.stdout.write(dumps({"config": cfg.header(), "traces": traces.splitlines(),
                                "topology": gt.topology.to_json(), "mapping": mapping}) + "\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _alpha(text: str) -> Fraction:
    try:
        return as_alpha(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=_alpha, default=Fraction(1),
                        help="routing consistency as p/q or 1 (default 1)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="output file (gen: path prefix)")

    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--max-partitions", type=_positive, default=DEFAULT_MAX_PARTITIONS)
    limits.add_argument("--max-stars", type=_positive, default=DEFAULT_MAX_STARS)
    limits.add_argument("--workers", type=_positive, default=1)

    parser = argparse.ArgumentParser(prog="startopo",
                                     description="Topology inference from traces with anonymous hops.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def traces_cmd(name: str, func, help_: str, parents=(common,)):
        p = sub.add_parser(name, parents=list(parents), help=help_)
        p.add_argument("traces", help="trace file, or - for stdin")
        p.set_defaults(func=func)
        return p

    traces_cmd("validate", cmd_validate, "parse a trace file and print its statistics")
    traces_cmd("canonic", cmd_canonic, "print the canonic topology")
    p = traces_cmd("stars", cmd_stars, "print the star graph with its colouring bounds")
    p.add_argument("--poly-limit", type=_positive, default=DEFAULT_POLY_LIMIT)
    p = traces_cmd("enumerate", cmd_enumerate, "list every inferrable topology",
                   (common, limits))
    p.add_argument("--rejected", action="store_true", help="also list rejected partitions")
    p = traces_cmd("metrics", cmd_metrics, "measure the ensemble and audit the bounds",
                   (common, limits))
    p.add_argument("--reference", help="ground-truth topology JSON for stretch")
    p.add_argument("--figures", metavar="DIR", help="write SVG figures and a CSV here")
    p = traces_cmd("check", cmd_check, "verify a topology and mapping against the axioms")
    p.add_argument("--topology", required=True)
    p.add_argument("--mapping", required=True)
    p.add_argument("--limit", type=_positive, default=100, help="maximum violations reported")
    traces_cmd("fullexp", cmd_fullexp, "test whether the trace set is fully explored")

    gen = sub.add_parser("gen", help="generate a ground truth and its traces")
    gen.set_defaults(func=cmd_gen)
    kinds = gen.add_subparsers(dest="kind", required=True)
    genopts = argparse.ArgumentParser(add_help=False)
    genopts.add_argument("--fully-explored", action="store_true",
                         help="add traces until the set is fully explored")
    genopts.add_argument("--preserve-degrees", action="store_true",
                         help="as --fully-explored, using relay nodes instead of stars")
    parents = [common, genopts]
    kinds.add_parser("star", parents=parents).add_argument("--s", type=_positive, required=True)
    p = kinds.add_parser("diam-chain", parents=parents)
    p.add_argument("--s", type=_positive, required=True)
    p.add_argument("--x", type=_positive, required=True)
    p = kinds.add_parser("realize", parents=parents)
    p.add_argument("--graph", help="JSON {vertices: [...], edges: [[a, b], ...]}")
    p.add_argument("--vertices", type=_positive, default=5,
                   help="size of a seeded random graph when --graph is absent")
    kinds.add_parser("fe-diam", parents=parents).add_argument("--k", type=_positive, required=True)
    p = kinds.add_parser("fe-tri", parents=parents)
    p.add_argument("--s", type=_positive, default=4)
    p.add_argument("--ratio-variant", action="store_true")
    p = kinds.add_parser("sample", parents=parents)
    p.add_argument("--topology", help="ground-truth topology JSON")
    p.add_argument("--pairs", help="comma separated a:b pairs to probe")
    p.add_argument("--max-nodes", type=_positive, default=20)
    p.add_argument("--anon-frac", type=float, default=0.3)
    p.add_argument("--max-pairs", type=_positive, default=15)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command if args.command != "gen" else f"gen {args.kind}",
            alpha=args.alpha,
            max_partitions=getattr(args, "max_partitions", DEFAULT_MAX_PARTITIONS),
            max_stars=getattr(args, "max_stars", DEFAULT_MAX_STARS),
            fmt=args.format,
            seed=args.seed,
            workers=getattr(args, "workers", 1),
            output=args.output,
        )
        return args.func(args, cfg)
    except LimitExceeded as exc:
        print(f"startopo: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, ValueError, KeyError, OSError) as exc:
        print(f"startopo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
