import json
import subprocess
import sys
from fractions import Fraction
from math import factorial

import pytest

from startopo.cli import main
from startopo.generators import gen_star_network
from startopo.traces import serialize_trace_set

from gadgets import four_star_traces


@pytest.fixture
def star4(tmp_path):
    path = tmp_path / "star4.traces"
    path.write_text(serialize_trace_set(gen_star_network(4).traces))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_stars_report(capsys, star4):
    code, out, _ = run(capsys, "stars", "--alpha", "1", star4)
    report = json.loads(out)
    assert code == 0
    assert report["chromatic_number"] == 1
    assert Fraction(report["counting_bound"]) == sum(Fraction(k**4, factorial(k)) for k in range(1, 5))
    assert report["independent_partitions"] == 15
    assert report["star_graph"]["vertices"] == [1, 2, 3, 4]


def test_enumerate_star4(capsys, star4):
    code, out, _ = run(capsys, "enumerate", "--alpha", "1", star4)
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0
    assert "config" in lines[0] and lines[0]["config"]["seed"] == 0
    records = [x for x in lines if "partition" in x]
    assert len(records) == 15
    summary = lines[-1]["summary"]
    assert summary["count"] == 15 and summary["bell_reference"] == 15 and not summary["truncated"]


def test_enumerate_reports_rejections(capsys, tmp_path):
    path = tmp_path / "four.traces"
    path.write_text(serialize_trace_set(four_star_traces(3)))
    _, out, _ = run(capsys, "enumerate", "--rejected", path)
    rejected = [json.loads(x) for x in out.splitlines() if '"rejected"' in x and "violation" in x]
    assert rejected[0]["rejected"] == [[1, 2], [3, 4]]
    assert rejected[0]["violation"]["axiom"] == 2


def test_output_is_byte_identical(capsys, star4):
    first = run(capsys, "metrics", star4)[1]
    second = run(capsys, "metrics", star4)[1]
    assert first == second


def test_workers_do_not_change_output(capsys, star4):
    assert run(capsys, "enumerate", star4)[1] == run(capsys, "enumerate", "--workers", "2", star4)[1]


def test_gen_then_check(capsys, tmp_path):
    prefix = str(tmp_path / "chain")
    assert run(capsys, "gen", "diam-chain", "--s", "3", "--x", "4", "-o", prefix)[0] == 0
    code, out, _ = run(capsys, "check", "--topology", prefix + ".topology.json",
                       "--mapping", prefix + ".mapping.json", prefix + ".traces")
    assert code == 0 and json.loads(out)["passed"] is True
    assert json.loads(out)["effective_alpha"] == "1"


def test_check_failure_exit_code(capsys, tmp_path):
    traces = tmp_path / "t.traces"
    traces.write_text("u v w\n")
    topo = tmp_path / "t.json"
    topo.write_text(json.dumps({"nodes": [{"label": x, "anonymous": False} for x in "uvw"],
                                "edges": [["u", "v"], ["v", "w"], ["u", "w"]]}))
    mapping = tmp_path / "m.json"
    mapping.write_text(json.dumps({"u": "u", "v": "v", "w": "w"}))
    code, out, _ = run(capsys, "check", "--topology", topo, "--mapping", mapping, traces)
    assert code == 1
    assert {v["axiom"] for v in json.loads(out)["violations"]} == {0, 2}


def test_fullexp_exit_codes(capsys, tmp_path):
    good, bad = tmp_path / "good.traces", tmp_path / "bad.traces"
    good.write_text("u v\nv w\nu w\n")
    bad.write_text("u * v\nv w\n")
    assert run(capsys, "fullexp", good)[0] == 0
    code, out, _ = run(capsys, "fullexp", bad)
    assert code == 1 and json.loads(out)["missing"] == [["u", "w"]]


def test_metrics_with_figures(capsys, star4, tmp_path):
    figs = tmp_path / "figs"
    code, out, _ = run(capsys, "metrics", "--figures", figs, star4)
    report = json.loads(out)
    assert code == 0
    assert set(report) >= {"per_topology", "ranges", "audit", "fully_explored", "config"}
    names = sorted(p.name for p in figs.iterdir())
    assert names == ["bound_audit.svg", "metric_distributions.svg", "metrics.csv"]
    first = (figs / "bound_audit.svg").read_bytes()
    run(capsys, "metrics", "--figures", figs, star4)
    assert (figs / "bound_audit.svg").read_bytes() == first
    assert (figs / "metrics.csv").read_text().count("\n") == 16


def test_metrics_with_reference(capsys, tmp_path):
    prefix = str(tmp_path / "g")
    run(capsys, "gen", "star", "--s", "2", "-o", prefix)
    _, out, _ = run(capsys, "metrics", "--reference", prefix + ".topology.json", prefix + ".traces")
    records = json.loads(out)["per_topology"]
    # merged member matches the hub; the canonic one splits the two traces apart
    assert [r["stretch"] for r in records] == ["1", None]
    assert [r["stretch_disconnected"] for r in records] == [False, True]


@pytest.mark.parametrize("argv", [
    ["stars", "/nonexistent.traces"],
    ["stars", "--alpha", "0.5", "x"],
    ["bogus"],
])
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_bad_trace_file(capsys, tmp_path):
    path = tmp_path / "bad.traces"
    path.write_text("* u v\n")
    code, _, err = run(capsys, "validate", path)
    assert code == 2 and "line 1" in err


def test_limit_is_named(capsys, star4):
    code, _, err = run(capsys, "enumerate", "--max-stars", "3", star4)
    assert code == 2 and "max_stars" in err


def test_text_format(capsys, star4):
    code, out, _ = run(capsys, "metrics", "--format", "text", star4)
    assert code == 0 and out.splitlines()[0].split()[:3] == ["metric", "measure", "scope"]
    code, out, _ = run(capsys, "validate", "--format", "text", star4)
    assert "stars" in out


@pytest.mark.parametrize("argv", [
    ["gen", "realize", "--vertices", "4", "--alpha", "1/2", "--seed", "3"],
    ["gen", "fe-diam", "--k", "2"],
    ["gen", "fe-tri", "--ratio-variant"],
    ["gen", "sample", "--seed", "5", "--fully-explored"],
    ["gen", "star", "--s", "3", "--preserve-degrees"],
])
def test_generators_emit_consistent_truths(capsys, tmp_path, argv):
    prefix = str(tmp_path / "gt")
    assert run(capsys, *argv, "-o", prefix)[0] == 0
    alpha = argv[argv.index("--alpha") + 1] if "--alpha" in argv else "1"
    code, out, _ = run(capsys, "check", "--alpha", alpha, "--topology", prefix + ".topology.json",
                       "--mapping", prefix + ".mapping.json", prefix + ".traces")
    assert code == 0, out


def test_module_entry_point(star4):
    proc = subprocess.run([sys.executable, "-m", "startopo", "validate", star4],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["stats"]["s"] == 4
