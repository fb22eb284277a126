import json

import pytest

from tracemc.cli import main
from tracemc.kripke import from_portable


FIG_MODEL = {
    "var": "current_state",
    "states": [
        {"id": "LEFT", "labels": ["current_state=LEFT"]},
        {"id": "RIGHT", "labels": ["current_state=RIGHT"]},
        {"id": "TAKEOFF", "labels": ["current_state=TAKEOFF"]},
    ],
    "initial": ["TAKEOFF"],
    "transitions": [["TAKEOFF", "LEFT"], ["TAKEOFF", "RIGHT"]],
}


def test_build_matches_golden_model(tmp_path, fixtures_dir):
    out = tmp_path / "model.json"
    rc = main(["build", "-t", str(fixtures_dir / "gesture_trace.log"), "-o", str(out)])
    assert rc == 0
    assert out.read_text(encoding="utf-8") == (
        fixtures_dir / "gesture_model.json"
    ).read_text(encoding="utf-8")
    assert json.loads(out.read_text(encoding="utf-8")) == FIG_MODEL


def test_build_keep_prefix(tmp_path, fixtures_dir):
    out = tmp_path / "model.json"
    rc = main(["build", "-t", str(fixtures_dir / "gesture_trace.log"), "-o", str(out),
               "--keep-prefix"])
    assert rc == 0
    model = from_portable(out.read_text(encoding="utf-8"))
    assert "TelloState.TAKEOFF" in model.states


def test_build_var_and_initial_override(tmp_path):
    trace = tmp_path / "t.log"
    trace.write_text("A\n->\nB\n", encoding="utf-8")
    out = tmp_path / "m.json"
    rc = main(["build", "-t", str(trace), "-o", str(out),
               "--var", "mode", "--initial", "B"])
    assert rc == 0
    model = from_portable(out.read_text(encoding="utf-8"))
    assert model.initial == {"B"}
    assert any(a.variable == "mode" for a in model.labels("A"))


def test_build_close_deadlocks(tmp_path):
    trace = tmp_path / "t.log"
    trace.write_text("A\n->\nB\n", encoding="utf-8")
    out = tmp_path / "m.json"
    assert main(["build", "-t", str(trace), "-o", str(out), "--close-deadlocks"]) == 0
    model = from_portable(out.read_text(encoding="utf-8"))
    assert ("B", "B") in model.transitions


def test_build_empty_trace_warns_but_succeeds(tmp_path, capsys):
    trace = tmp_path / "empty.log"
    trace.write_text("", encoding="utf-8")
    out = tmp_path / "m.json"
    assert main(["build", "-t", str(trace), "-o", str(out)]) == 0
    captured = capsys.readouterr()
    assert "no sequences" in captured.err
    model = from_portable(out.read_text(encoding="utf-8"))
    assert model.states == frozenset()


def test_build_missing_trace_exits_2(tmp_path, capsys):
    rc = main(["build", "-t", str(tmp_path / "nope.log"), "-o", str(tmp_path / "m.json")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_check_table_outcomes(fixtures_dir, capsys):
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"),
               "-p", str(fixtures_dir / "drone.props")])
    assert rc == 1  # phi1 and phi5 fail
    out = capsys.readouterr().out
    verdicts = [line.split()[1] for line in out.strip().splitlines()
                if line.split()[0].startswith("phi")]
    assert verdicts == ["False", "True", "True", "True", "False", "True"]


def test_check_json_output(fixtures_dir, capsys):
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"),
               "-p", str(fixtures_dir / "drone.props"), "--json"])
    assert rc == 1
    doc = json.loads(capsys.readouterr().out)
    assert [r["holds"] for r in doc["results"]] == [False, True, True, True, False, True]
    assert doc["all_hold"] is False
    assert [r["name"] for r in doc["results"]] == [f"phi{i}" for i in range(1, 7)]


def test_check_witness_lines(fixtures_dir, capsys):
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"),
               "-p", str(fixtures_dir / "drone.props"), "--witness"])
    assert rc == 1
    out = capsys.readouterr().out
    assert "lasso" in out


def test_check_all_pass_exits_0(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "ok.props"
    props.write_text("E(F current_state=FIN)\n", encoding="utf-8")
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"), "-p", str(props)])
    assert rc == 0
    assert "True" in capsys.readouterr().out


def test_check_non_total_model_requires_flag(tmp_path, fixtures_dir, capsys):
    model = tmp_path / "m.json"
    rc = main(["build", "-t", str(fixtures_dir / "gesture_trace.log"), "-o", str(model)])
    assert rc == 0
    props = tmp_path / "p.props"
    props.write_text("E(F current_state=LEFT)\n", encoding="utf-8")

    rc = main(["check", "-m", str(model), "-p", str(props)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "deadlock" in err and "--close-deadlocks" in err

    rc = main(["check", "-m", str(model), "-p", str(props), "--close-deadlocks"])
    assert rc == 0


def test_check_property_syntax_error_names_position(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "bad.props"
    props.write_text("good: E(F current_state=FIN)\nbad: E(F\n", encoding="utf-8")
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"), "-p", str(props)])
    assert rc == 2
    err = capsys.readouterr().err
    assert f"{props}:2:" in err


def test_check_duplicate_property_names(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "dup.props"
    props.write_text("a: true\na: false\n", encoding="utf-8")
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"), "-p", str(props)])
    assert rc == 2
    assert "duplicate" in capsys.readouterr().err


def test_check_malformed_model_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"var": "v", "states": [], "initial": [], "transitions": [], "x": 1}',
                   encoding="utf-8")
    props = tmp_path / "p.props"
    props.write_text("true\n", encoding="utf-8")
    rc = main(["check", "-m", str(bad), "-p", str(props)])
    assert rc == 2
    assert "x" in capsys.readouterr().err


def test_check_comments_and_autonaming(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "p.props"
    props.write_text(
        "# a comment line\n"
        "\n"
        "E(F current_state=FIN)  # trailing comment\n"
        "named: true\n",
        encoding="utf-8",
    )
    rc = main(["check", "-m", str(fixtures_dir / "drone_model.json"), "-p", str(props)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "phi1" in out and "named" in out


def test_run_matches_build_then_check(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "p.props"
    props.write_text("E(F current_state=LEFT)\nE(F current_state=UP)\n", encoding="utf-8")
    rc = main(["run", "-t", str(fixtures_dir / "gesture_trace.log"), "-p", str(props)])
    out = capsys.readouterr().out
    assert rc == 1  # UP is never observed
    lines = out.strip().splitlines()
    assert any("sequences=3" in line for line in lines)
    verdicts = [ln.split()[1] for ln in lines if ln.startswith("phi")]
    assert verdicts == ["True", "False"]


def test_run_jobs_agree(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "p.props"
    props.write_text("E(F current_state=LEFT)\n", encoding="utf-8")
    args = ["run", "-t", str(fixtures_dir / "gesture_trace.log"),
            str(fixtures_dir / "gesture_trace.log"), "-p", str(props)]
    rc1 = main(args + ["--jobs", "1"])
    out1 = capsys.readouterr().out
    rc4 = main(args + ["--jobs", "4"])
    out4 = capsys.readouterr().out
    assert rc1 == rc4 == 0
    assert out1 == out4


def test_run_trace_cmd(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "p.props"
    props.write_text("E(F current_state=LEFT)\n", encoding="utf-8")
    rc = main(["run", "--trace-cmd", f"cat {fixtures_dir / 'gesture_trace.log'}",
               "-p", str(props)])
    assert rc == 0
    assert "True" in capsys.readouterr().out


def test_run_json_document(tmp_path, fixtures_dir, capsys):
    props = tmp_path / "p.props"
    props.write_text("E(F current_state=LEFT)\n", encoding="utf-8")
    rc = main(["run", "-t", str(fixtures_dir / "gesture_trace.log"), "-p", str(props),
               "--json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["all_hold"] is True
    assert doc["sources"][0]["sequences"] == 3
    assert doc["model"]["states"] == 3


def test_run_requires_a_source(tmp_path, capsys):
    props = tmp_path / "p.props"
    props.write_text("true\n", encoding="utf-8")
    rc = main(["run", "-p", str(props)])
    assert rc == 2
    assert "source" in capsys.readouterr().err


def test_run_all_sources_missing_exits_2(tmp_path, capsys):
    props = tmp_path / "p.props"
    props.write_text("true\n", encoding="utf-8")
    rc = main(["run", "-t", str(tmp_path / "gone.log"), "-p", str(props)])
    assert rc == 2


def test_export_dot(tmp_path, fixtures_dir):
    out = tmp_path / "m.dot"
    rc = main(["export", "-m", str(fixtures_dir / "drone_model.json"), "--dot", str(out)])
    assert rc == 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith("digraph kripke {")
    assert '"LAND" -> "TAKEOFF";' in text
    assert "doublecircle" in text


def test_usage_errors_exit_2(capsys):
    assert main([]) == 2
    capsys.readouterr()
    assert main(["check"]) == 2
    capsys.readouterr()
    assert main(["frobnicate"]) == 2
    capsys.readouterr()
