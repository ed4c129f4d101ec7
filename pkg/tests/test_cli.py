"""The `widget` command line: exit codes and output shapes."""

import json

import pytest

from widget_calculus.cli import main

from helpers import SAMPLES


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("name", ["example1.wdg", "example2.wdg", "buddy.wdg"])
def test_check_accepts_the_samples(capsys, name):
    code, _, err = run_cli(capsys, "check", str(SAMPLES / name))
    assert code == 0 and err == ""


def test_check_rejects_ill_typed_programs(capsys, tmp_path):
    bad = tmp_path / "bad.wdg"
    bad.write_text("val main:<Top> = 1 + 'x'")
    code, _, err = run_cli(capsys, "check", str(bad))
    assert code == 1 and "bad.wdg" in err


def test_check_rejects_unrunnable_entry(capsys, tmp_path):
    bad = tmp_path / "bad.wdg"
    bad.write_text("val main:<int> = do { return 1 }")
    code, _, err = run_cli(capsys, "check", str(bad))
    assert code == 1 and "widget" in err


def test_missing_file_is_a_usage_error(capsys):
    code, _, err = run_cli(capsys, "check", "no-such-file.wdg")
    assert code == 2 and "no-such-file.wdg" in err


def test_unknown_subcommand_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_run_headless_prints_one_frame_per_line(capsys, tmp_path):
    script = tmp_path / "s.json"
    script.write_text(json.dumps([{"type": "ui-event", "select": "button", "name": "push"}]))
    code, out, _ = run_cli(
        capsys,
        "run", str(SAMPLES / "example2.wdg"),
        "--script", str(script),
        "--workdir", str(tmp_path),
    )
    assert code == 0
    frames = [json.loads(line) for line in out.splitlines()]
    assert len(frames) == 2
    labels = [
        f["children"][0]["props"]["label"] if f["kind"] != "button" else f["props"]["label"]
        for f in frames
    ]
    assert labels == ["PUSHME", "PUSHED"]


def test_run_writes_trace_file_when_asked(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = run_cli(
        capsys,
        "run", str(SAMPLES / "example1.wdg"),
        "--trace", str(trace),
        "--workdir", str(tmp_path),
    )
    assert code == 0 and out == ""
    assert len(json.loads(trace.read_text())) == 1


def test_run_refuses_unrunnable_programs(capsys, tmp_path):
    bad = tmp_path / "bad.wdg"
    bad.write_text(
        "type M = Widget(Button) raises push(int) {}\n"
        "val main:<M> = widget (button('x')) { }"
    )
    code, _, err = run_cli(capsys, "run", str(bad), "--workdir", str(tmp_path))
    assert code == 1 and "push(int)" in err


def test_gen_writes_the_generated_program(capsys, tmp_path):
    out_file = tmp_path / "gen.wdg"
    code, _, _ = run_cli(
        capsys, "gen", str(SAMPLES / "buddy-model.json"), "-o", str(out_file)
    )
    assert code == 0
    assert out_file.read_text() == (SAMPLES / "buddy-gen.wdg").read_text()


def test_gen_reports_model_errors(capsys, tmp_path):
    bad = tmp_path / "m.json"
    model = json.loads((SAMPLES / "buddy-model.json").read_text())
    del model["statemachine"]["initial"]
    bad.write_text(json.dumps(model))
    code, _, err = run_cli(capsys, "gen", str(bad))
    assert code == 1 and "no initial state" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
