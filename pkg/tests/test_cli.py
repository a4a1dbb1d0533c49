import csv
import io
import json
import subprocess
import sys

import pytest

from cliffpart.cli import EXIT_CAPACITY, EXIT_FAIL, EXIT_OK, EXIT_USAGE, env_guards, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_partition_all_methods_agree(capsys):
    code, out, _ = run(capsys, "partition", "--n", "2", "--p", "2", "--q", "2",
                       "--a", "0.3", "--b", "0.2", "--method", "all")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"]
    assert [r["method"] for r in rep["results"]] == ["brute", "transfer", "decomposed", "multisum", "closed-form"]
    assert len(rep["deviations"]) == 10 and all(d["pass"] for d in rep["deviations"])
    assert rep["results"][3]["terms"] == 8192


def test_partition_zero_coupling(capsys):
    code, out, _ = run(capsys, "partition", "--n", "3", "--p", "2", "--q", "3",
                       "--a", "0", "--b", "0", "--method", "brute")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["results"][0]["Z_re"] == 729.0


def test_partition_capacity_error(capsys):
    code, out, err = run(capsys, "partition", "--n", "4", "--p", "3", "--q", "3", "--method", "multisum")
    rec = json.loads(out)
    assert code == EXIT_CAPACITY
    assert rec["error"] == "capacity" and rec["needed"] == 4**28 and rec["limit"] == 2**24
    assert "capacity" in err


def test_partition_all_skips_what_does_not_fit(capsys):
    code, out, _ = run(capsys, "partition", "--n", "3", "--p", "2", "--q", "2", "--a", "0.2", "--b", "0.1")
    rep = json.loads(out)
    assert code == EXIT_OK
    skipped = {s["method"] for s in rep["skipped"]}
    assert "closed-form" in skipped
    assert {r["method"] for r in rep["results"]} >= {"brute", "transfer", "decomposed"}


def test_partition_closed_form_outside_domain(capsys):
    code, out, _ = run(capsys, "partition", "--method", "closed-form", "--a", "-0.1")
    assert code == EXIT_USAGE and json.loads(out)["error"] == "usage"


def test_tight_tolerance_reports_failure(capsys):
    code, out, _ = run(capsys, "partition", "--n", "3", "--p", "2", "--q", "2", "--rtol", "0",
                       "--method", "all", "--a", "0.3", "--b", "0.4")
    rep = json.loads(out)
    # the routes differ by rounding only, which a zero tolerance still rejects
    assert code == EXIT_FAIL and not rep["passed"]
    assert max(d["rel"] for d in rep["deviations"]) < 1e-12


def test_csv_schema(capsys):
    code, out, _ = run(capsys, "partition", "--method", "brute", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK
    assert rows[0] == ["method", "n", "p", "q", "a", "b", "Z_re", "Z_im", "wall_ms", "terms"]
    assert rows[1][0] == "brute" and rows[1][8] == "" and rows[1][9] == "16"
    assert float(rows[1][6]) > 0


def test_timings_flag(capsys):
    _, out, _ = run(capsys, "partition", "--method", "transfer", "--timings")
    assert json.loads(out)["results"][0]["wall_ms"] >= 0


@pytest.mark.parametrize("word,expected", [
    (["--n", "2", "--p", "1", "g1", "g1"], 1.0),
    (["--n", "3", "--p", "2", "g1", "g2", "g1"], 0.0),
    (["--n", "3", "--p", "1", "g1", "g1", "g1"], 1.0),
])
def test_trace_examples(capsys, word, expected):
    code, out, _ = run(capsys, "trace", *word)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["agree"]
    for key in ("normal_form", "theorem", "matrix"):
        assert rep[key]["re"] == pytest.approx(expected, abs=1e-12)


def test_trace_bad_label(capsys):
    code, out, err = run(capsys, "trace", "--n", "3", "--p", "1", "g1", "g7")
    assert code == EXIT_USAGE and "g7" in err


@pytest.mark.parametrize("argv", [
    ["partition", "--n", "x"],
    ["partition", "--method", "nope"],
    ["frobnicate"],
    ["verify", "--suite", "nope"],
    ["partition", "--n", "1"],
    ["verify", "--tol", "trace"],
    ["verify", "--tol", "nope=1"],
    ["verify", "--inject-fault", "1"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_verify_subset_and_determinism(capsys):
    argv = ["verify", "--seed", "7", "--suite", "trace", "--suite", "closed_form"]
    c1, o1, e1 = run(capsys, *argv)
    c2, o2, _ = run(capsys, *argv)
    assert c1 == c2 == EXIT_OK and o1 == o2
    rep = json.loads(o1)
    assert rep["seed"] == 7 and [s["name"] for s in rep["suites"]] == ["trace", "closed_form"]
    assert "suite trace: PASS" in e1


def test_verify_injected_fault_names_pair(capsys):
    code, out, err = run(capsys, "verify", "--suite", "representation", "--inject-fault", "0,1")
    assert code == EXIT_FAIL and not json.loads(out)["passed"]
    assert "pair (g1, g2)" in err


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "hyperbolic", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0][:2] == ["suite", "result"] and rows[1][:2] == ["hyperbolic", "PASS"]


def test_json_round_trip(capsys):
    for argv in (["partition", "--method", "all"], ["trace", "--n", "2", "--p", "2", "g1", "g2", "g1", "g2"],
                 ["verify", "--suite", "decomposition"]):
        _, out, _ = run(capsys, *argv)
        rep = json.loads(out)
        assert json.loads(json.dumps(rep)) == rep
        assert json.dumps(rep, indent=2, sort_keys=True) + "\n" == out


def test_env_guards_parsing():
    assert env_guards(None) == {}
    assert env_guards("10") == {"brute_guard": 1024, "multisum_guard": 1024}
    assert env_guards("dense=4, theorem=3") == {"dense_guard": 16, "theorem_guard": 8}
    for bad in ("x", "brute=y", "what=3"):
        with pytest.raises(Exception):
            env_guards(bad)


def test_env_guard_applies(capsys, monkeypatch):
    monkeypatch.setenv("CLIFFPART_GUARD_BITS", "brute=3")
    code, out, _ = run(capsys, "partition", "--method", "brute")
    assert code == EXIT_CAPACITY and json.loads(out)["limit"] == 8
    # explicit flags win over the environment
    code, _, _ = run(capsys, "partition", "--method", "brute", "--brute-guard", "100")
    assert code == EXIT_OK


def test_env_guard_malformed(capsys, monkeypatch):
    monkeypatch.setenv("CLIFFPART_GUARD_BITS", "brute=")
    assert run(capsys, "partition")[0] == EXIT_USAGE


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 3, "p": 2, "q": 3, "a": 0, "b": 0, "method": "brute"}))
    code, out, _ = run(capsys, "partition", "--config", str(cfg))
    assert code == EXIT_OK and json.loads(out)["results"][0]["Z_re"] == 729.0
    code, out, _ = run(capsys, "partition", "--config", str(cfg), "--q", "1")
    assert json.loads(out)["results"][0]["Z_re"] == 9.0
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "partition", "--config", str(cfg))[0] == EXIT_USAGE
    assert run(capsys, "partition", "--config", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cliffpart.cli", "trace", "--n", "2", "--p", "1", "g1", "g1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["agree"]
