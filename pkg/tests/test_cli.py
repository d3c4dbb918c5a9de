import json
import subprocess
import sys

import pytest

from dainf.catalog import WORKED, corpus_path, golden_path, run_example
from dainf.cli import main, run


@pytest.mark.parametrize("ex", WORKED, ids=[e.name for e in WORKED])
def test_worked_example_matches_golden(ex):
    code, text = run_example(ex)
    assert code == ex.exit_code
    with open(golden_path(ex.name), encoding="utf-8") as fh:
        assert text == fh.read()


def test_reports_are_deterministic():
    argv = ["massey", corpus_path("massey.dai"), "--classes", "[x],[x],[x]"]
    assert run(argv)[1] == run(argv)[1]


def test_report_fields():
    code, text, _ = run(["validate", corpus_path("exterior.dai")])
    rep = json.loads(text)
    assert code == 0
    assert set(rep) == {"command", "inputs_digest", "window", "status", "totality", "results"}
    assert rep["status"] == "verified"
    assert len(rep["inputs_digest"]) == 64


def test_digest_depends_on_flags_that_change_the_run():
    a = json.loads(run(["massey", corpus_path("massey.dai"), "--classes", "[x],[x],[x]"])[1])
    b = json.loads(run(["massey", corpus_path("massey.dai"), "--classes", "[x],[x],[x]", "--seed", "4"])[1])
    assert a["inputs_digest"] != b["inputs_digest"]


def test_timing_is_opt_in():
    rep = json.loads(run(["validate", corpus_path("ground.dai"), "--timing"])[1])
    assert "timing" in rep


def test_output_file(tmp_path):
    out = tmp_path / "r.json"
    code = main(["validate", corpus_path("exterior.dai"), "--output", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["status"] == "verified"


def test_perturb_emits_a_presentation(tmp_path):
    out = tmp_path / "p.dai"
    code, _, _ = run(["perturb", corpus_path("local_sphere_m4.dai"), "--theorem", "classical", "--cochain", "p",
                      "--case", "classical", "--emit", str(out)])
    assert code == 0
    with open(corpus_path("local_sphere_m4_perturbed.dai"), encoding="utf-8") as fh:
        expected = fh.read()
    assert out.read_text() == expected.replace("structure L\n", "structure L_perturbed\n")


def test_unmet_theorem_precondition_exits_2():
    # the derived criterion needs m01 = 0
    with pytest.raises(SystemExit) as info:
        run(["perturb", corpus_path("local_sphere_m4.dai"), "--theorem", "derived", "--cochain", "p", "--case", "A"])
    assert info.value.code == 2


@pytest.mark.parametrize("argv", [
    ["validate", "/nonexistent/file.dai"],
    ["bracket", "ground.dai"],
    ["hochschild", "exterior.dai", "--flavor", "nope"],
    ["massey", "massey.dai", "--classes", "[x],[q],[x]"],
])
def test_usage_errors_exit_2(argv):
    argv = [argv[0], corpus_path(argv[1]) if not argv[1].startswith("/") else argv[1]] + argv[2:]
    with pytest.raises(SystemExit) as info:
        run(argv)
    assert info.value.code == 2


def test_parse_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.dai"
    bad.write_text("structure S\nring zz\nbasis a 0 -1\nm 0 2 : a a -> 1*a\nend\n")
    with pytest.raises(SystemExit) as info:
        run(["validate", str(bad)])
    assert info.value.code == 2
    assert "line 4" in capsys.readouterr().err


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "dainf.cli", "validate", corpus_path("ground.dai")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "verified"
