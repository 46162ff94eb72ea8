import json

import pytest

from expander_routing.cli import main as cli_main
from expander_routing.errors import CallerError, FormatError
from expander_routing.expanders import gen_random_regular_graph
from expander_routing.graph import save_graph
from expander_routing.harness import (
    TraceCommand,
    format_trace,
    gen_workload,
    parse_trace,
    run_trace,
    validate_trace,
)
from expander_routing.profiles import desk_profile, save_profile
from expander_routing.router import RoutingEngine


def test_parse_basic():
    cmds = parse_trace("find 0 5\nremove 0")
    assert [c.kind for c in cmds] == ["find", "remove"]
    assert (cmds[0].a, cmds[0].b) == (0, 5)
    assert cmds[1].ref == 0


def test_parse_skips_comments_and_blanks():
    cmds = parse_trace("# comment\n\nverify")
    assert [c.kind for c in cmds] == ["verify"]


def test_parse_error_carries_line_number():
    with pytest.raises(FormatError, match="line 1"):
        parse_trace("find 0")
    with pytest.raises(FormatError, match="line 3"):
        parse_trace("find 0 1\nverify\nwiggle")


def test_format_round_trip():
    cmds = [
        TraceCommand("find", a=1, b=2, line=1),
        TraceCommand("remove", ref=-1, line=2),
        TraceCommand("verify", line=3),
        TraceCommand("stats", line=4),
    ]
    assert parse_trace(format_trace(cmds)) == [
        TraceCommand("find", a=1, b=2, line=1),
        TraceCommand("remove", ref=-1, line=2),
        TraceCommand("verify", line=3),
        TraceCommand("stats", line=4),
    ]


def make_engine(n=150, d=30, seed=61):
    g = gen_random_regular_graph(n, d, seed=seed)
    return RoutingEngine(g, desk_profile(n, d))


def test_run_empty_trace():
    report = run_trace(make_engine(), [])
    assert report.requests_served == 0
    assert report.clean


def test_run_records_caller_error_and_continues():
    eng = make_engine()
    cmds = parse_trace("find 3 3\nfind 1 2\nverify")
    report = run_trace(eng, cmds)
    assert len(report.failures) == 1
    line, cls, _ = report.failures[0]
    assert (line, cls) == (1, "caller-error")
    assert report.requests_served == 1
    assert report.verifies_run == 1
    assert report.verify_findings == 0


def test_remove_by_negative_ref():
    eng = make_engine()
    cmds = parse_trace("find 0 10\nfind 1 11\nremove -2\nverify")
    report = run_trace(eng, cmds)
    assert report.clean
    assert list(eng.registry) == [1]  # -2 removed the older of the two


def test_stats_and_emit_lines():
    eng = make_engine()
    lines = []
    run_trace(eng, parse_trace("find 0 10\nstats"), emit=lines.append)
    assert lines[0].startswith("PATH 0 0 10 ")
    assert lines[0].split(" : ")[1].split()[0] == "0"
    assert lines[1] == "STATS live=1 served=1 failures=0"


def test_verify_every_runs_checks():
    eng = make_engine()
    cmds = gen_workload("churn", eng.n, {"ops": 40, "live_target": 4}, 5,
                        eng.profile.endpoint_cap, eng.profile.r)
    report = run_trace(eng, cmds, verify_every=2)
    assert report.verifies_run == len(cmds) // 2
    assert report.clean


@pytest.mark.parametrize("kind", ["churn", "fill", "hotspot"])
@pytest.mark.parametrize("seed", [0, 7, 23])
def test_generated_workloads_respect_rules(kind, seed):
    n, cap, r = 80, 3, 12
    params = {"ops": 200, "live_target": 6, "count": 10}
    cmds = gen_workload(kind, n, params, seed, cap, r)
    assert validate_trace(cmds, n, cap, r) == []
    if kind == "fill":
        assert sum(1 for c in cmds if c.kind == "find") == 10


def test_fill_of_zero_is_empty():
    assert gen_workload("fill", 50, {"count": 0}, 1, 2, 10) == []


def test_fill_must_stay_below_volume_cap():
    with pytest.raises(CallerError):
        gen_workload("fill", 50, {"count": 10}, 1, 2, 10)


def test_hotspot_rotates_before_the_cap():
    cap = 4
    cmds = gen_workload("hotspot", 60, {"ops": 120, "live_target": 30}, 9, cap, 40)
    assert validate_trace(cmds, 60, cap, 40) == []
    streak = {}
    for c in cmds:
        if c.kind == "find":
            streak[c.a] = streak.get(c.a, 0) + 1
    assert max(streak.values()) <= cap - 1


def test_workload_rejects_unknown_kind():
    with pytest.raises(CallerError):
        gen_workload("stampede", 10, {}, 1, 2, 5)


# --- command line -----------------------------------------------------------


def test_cli_pipeline(tmp_path, capsys):
    graph_path = tmp_path / "g.txt"
    profile_path = tmp_path / "p.txt"
    trace_path = tmp_path / "t.txt"
    json_path = tmp_path / "report.json"

    assert cli_main(["gen", "--n", "150", "--d", "30", "--seed", "3",
                     "--out", str(graph_path)]) == 0
    save_profile(profile_path, desk_profile(150, 30))
    assert cli_main(["gen-workload", "--graph", str(graph_path), "--profile",
                     str(profile_path), "--kind", "churn", "--seed", "11",
                     "--ops", "60", "--out", str(trace_path)]) == 0
    code = cli_main(["run", "--graph", str(graph_path), "--profile", str(profile_path),
                     "--trace", str(trace_path), "--verify-every", "10",
                     "--json", str(json_path), "--quiet"])
    assert code == 0
    payload = json.loads(json_path.read_text())
    assert payload["failures"] == []
    assert payload["requests_served"] == 60
    capsys.readouterr()


def test_cli_run_flags_failures(tmp_path, capsys):
    graph_path = tmp_path / "g.txt"
    save_graph(graph_path, gen_random_regular_graph(150, 30, seed=3))
    trace_path = tmp_path / "t.txt"
    trace_path.write_text("find 5 5\n")
    code = cli_main(["run", "--graph", str(graph_path), "--desk",
                     "--trace", str(trace_path), "--quiet"])
    assert code == 1
    capsys.readouterr()


def test_cli_preprocess(tmp_path, capsys):
    graph_path = tmp_path / "g.txt"
    save_graph(graph_path, gen_random_regular_graph(100, 20, seed=2))
    prefix = str(tmp_path / "out")
    assert cli_main(["preprocess", str(graph_path), prefix]) == 0
    for suffix in (".host", ".g1", ".g2", ".g3", ".header"):
        assert (tmp_path / ("out" + suffix)).exists()
    header = (tmp_path / "out.header").read_text()
    assert "k=10" in header and "d_prime=1" in header
    capsys.readouterr()


def test_cli_spectrum_and_expansion(tmp_path, capsys):
    graph_path = tmp_path / "k5.txt"
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    from expander_routing.graph import UndirectedGraph

    save_graph(graph_path, UndirectedGraph(5, edges))
    assert cli_main(["spectrum", "--graph", str(graph_path)]) == 0
    out = capsys.readouterr().out
    payload = json.loads(out.strip().splitlines()[-1])
    assert abs(payload["lambda_estimate"] - 1.0) < 1e-6
    assert cli_main(["check-expansion", "--graph", str(graph_path),
                     "--beta", "1/2", "--gamma", "1", "--max-subset-size", "2"]) == 0
    capsys.readouterr()


def test_cli_profile_out(tmp_path, capsys):
    out = tmp_path / "prof.txt"
    assert cli_main(["profile", "--n", "1024", "--d", "400", "--beta", "1/100",
                     "--gamma", "1/2000", "--out", str(out)]) == 0
    text = out.read_text()
    assert "d_prime=20" in text
    capsys.readouterr()


def test_cli_reports_errors(tmp_path, capsys):
    code = cli_main(["run", "--graph", str(tmp_path / "missing.txt"),
                     "--desk", "--trace", "-"])
    assert code == 2
    capsys.readouterr()
