import json

import pytest

from adjusted.cli import main, parse_bag
from adjusted.seqspec import SpecError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- bag parsing ------------------------------------------------------------------


def test_parse_bag_accepts_all_three_op_forms():
    bag = parse_bag("inc,offer(2),set:1,put(1,2)")
    assert [(o.template, o.args) for o in bag] == [
        ("inc", ()), ("offer", (2,)), ("set", (1,)), ("put", (1, 2)),
    ]
    assert [o.instance_id for o in bag] == [0, 1, 2, 3]


def test_parse_bag_rejects_garbage():
    for bad in ("", "inc,,inc", "1inc", "offer(1"):
        with pytest.raises(SpecError):
            parse_bag(bad)


# -- analyze ----------------------------------------------------------------------


def test_analyze_two_blind_increments_split_into_two_classes(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--spec", "C2", "--bag", "inc,inc",
        "--state", "0", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert len(doc["nodes"]) == 2
    assert doc["edges"] == []
    assert doc["classes"] == 2


def test_analyze_output_is_byte_stable(capsys):
    args = ("analyze", "--spec", "R1", "--bag", "set(1),set(2),get")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.endswith("\n")


def test_analyze_dot_output(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--spec", "Q1", "--bag", "offer(1),poll",
        "--format", "dot",
    )
    assert code == 0
    assert out.splitlines()[0] == "graph indistinguishability {"
    assert '"offer(1),poll()" -- "poll(),offer(1)"' in out
    assert out.rstrip().endswith("}")


def test_analyze_honors_params_and_state(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--spec", "C2", "--bag", "inc(7),get",
        "--state", "5", "--params", '{"deltas": [7]}',
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["start_state"] == 5
    assert doc["classes"] == 1


def test_analyze_usage_errors_exit_2(capsys):
    assert run_cli(capsys, "analyze", "--spec", "C2", "--bag", "warp")[0] == 2
    assert run_cli(capsys, "analyze", "--spec", "ZZ", "--bag", "inc")[0] == 2
    assert run_cli(capsys, "analyze", "--spec", "C2", "--bag", "inc,,")[0] == 2
    code, _, err = run_cli(
        capsys, "analyze", "--spec", "C2",
        "--bag", "inc,inc,inc,inc,inc,inc,inc",
    )
    assert code == 2
    assert "factorial bound" in err


# -- adjusts-check ------------------------------------------------------------------


def test_adjusts_check_forward_passes_reverse_fails(capsys):
    code, out, _ = run_cli(capsys, "adjusts-check",
                           "--adjusted", "S2", "--base", "S1")
    assert code == 0
    assert out.startswith("PASS")
    code, out, _ = run_cli(capsys, "adjusts-check",
                           "--adjusted", "S1", "--base", "S2")
    assert code == 1
    assert out.startswith("FAIL")
    assert "post:FAIL" in out


def test_adjusts_check_json_shape(capsys):
    code, out, _ = run_cli(capsys, "adjusts-check", "--adjusted", "M2",
                           "--base", "M1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["adjusted"] == "M2"
    assert doc["base"] == "M1"
    assert doc["pass"] is True
    assert doc["narrowness"]["missing_templates"] == []


# -- lincheck -----------------------------------------------------------------------


def test_lincheck_live_certifies_shipped_objects(capsys):
    code, out, _ = run_cli(
        capsys, "lincheck", "--object", "queue.adjusted",
        "--threads", "3", "--ops", "3", "--trials", "4", "--seed", "7",
    )
    assert code == 0
    assert "certified 4" in out


def test_lincheck_history_file_verdicts(tmp_path, capsys):
    good = tmp_path / "good.jsonl"
    good.write_text(
        '{"ts": 1, "thread": "A", "kind": "invoke", "op": "set", "args": [1]}\n'
        '{"ts": 2, "thread": "A", "kind": "respond", "op": "set", '
        '"args": [1], "resp": {"$": "void"}}\n'
    )
    code, out, _ = run_cli(capsys, "lincheck", "--object",
                           "reference.adjusted", "--history", str(good))
    assert code == 0
    assert "linearizable: 1" in out

    bad = tmp_path / "bad.jsonl"
    bad.write_text(
        '{"ts": 1, "thread": "A", "kind": "invoke", "op": "set", "args": [1]}\n'
        '{"ts": 2, "thread": "A", "kind": "respond", "op": "set", '
        '"args": [1], "resp": {"$": "void"}}\n'
        '{"ts": 3, "thread": "B", "kind": "invoke", "op": "get", "args": []}\n'
        '{"ts": 4, "thread": "B", "kind": "respond", "op": "get", '
        '"args": [], "resp": {"$": "bottom"}}\n'
    )
    code, out, _ = run_cli(capsys, "lincheck", "--object",
                           "reference.adjusted", "--history", str(bad))
    assert code == 1
    assert "NOT linearizable" in out

    code, _, err = run_cli(capsys, "lincheck", "--object",
                           "reference.adjusted", "--history",
                           str(tmp_path / "missing.jsonl"))
    assert code == 2


def test_lincheck_rechecks_traces_with_widened_domains(tmp_path, capsys):
    # a recording made under the stress profile uses more keys than the
    # default map domains; feeding it back must still certify
    import random

    from adjusted.linearizer import (Recorder, record, random_workload,
                                     stress_profile)
    from adjusted.objects import make_object

    oid = "hashmap.segmented"
    spec, threads, allow = stress_profile(oid, 3)
    plan = random_workload(spec, threads, 4, random.Random(5), allow=allow)
    hist = record(Recorder(make_object(oid), oid), plan)
    trace = tmp_path / "trace.jsonl"
    trace.write_text(hist.to_jsonl())

    code, out, _ = run_cli(capsys, "lincheck", "--object", oid,
                           "--history", str(trace))
    assert code == 0
    assert "linearizable: 12" in out


# -- benches ------------------------------------------------------------------------


def test_bench_micro_csv_columns(capsys):
    code, out, _ = run_cli(
        capsys, "bench-micro", "--object", "counter.adjusted",
        "-t", "2", "-n", "300", "-r", "2", "--seed", "5", "--out", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "run,thread,ops,seconds,ops_per_sec"
    assert len(lines) == 1 + 4  # 2 runs x 2 threads
    assert all(row.split(",")[2] == "300" for row in lines[1:])


def test_bench_micro_json_report(capsys):
    code, out, _ = run_cli(
        capsys, "bench-micro", "--object", "hashmap.swmr", "-t", "1",
        "-n", "200", "-r", "1", "--seed", "1", "-u", "30",
        "-k", "64", "-i", "16",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "v1"
    assert doc["label"] == "hashmap.swmr"
    assert doc["config"]["update_ratio"] == 30
    assert sum(doc["mix_counts"].values()) == 200


def test_bench_retwis_json_and_mix_parsing(capsys):
    code, out, _ = run_cli(
        capsys, "bench-retwis", "--users", "40", "--threads", "2",
        "-n", "500", "-r", "1", "--seed", "9",
        "--mix", "add_user=5,follow_unfollow=5,post=15,timeline=60,"
                 "join_leave=5,profile=10",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["label"] == "retwis/adjusted"
    assert sum(doc["mix_counts"].values()) == 1000


def test_bench_retwis_rejects_bad_mix(capsys):
    code, _, err = run_cli(
        capsys, "bench-retwis", "--users", "40", "-n", "10", "-r", "1",
        "--mix", "timeline=100,add_user=0",
    )
    assert code == 2
    assert "mix" in err


def test_help_enumerates_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench-retwis", "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "(default: 0.6)" in out  # alpha
    assert "(default: 5.0)" in out  # duration
    assert "(default: adjusted)" in out


def test_missing_subcommand_is_usage_error(capsys):
    assert main([]) == 2
    assert main(["analyze"]) == 2
