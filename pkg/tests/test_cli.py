import json
import shutil
import subprocess
import sys

import pytest

from lefloc.cli import COMMANDS, corpus_dir, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_corpus(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "FAIL" not in out
    assert out.rstrip().endswith("expectations passed")


def test_verify_parallel_matches_serial(capsys):
    _, serial, _ = run(capsys, "verify", "--json")
    code, par, _ = run(capsys, "verify", "--json", "--jobs", "3")
    assert code == 0 and json.loads(par) == json.loads(serial)


def test_resolves_corpus_names(capsys):
    code, out, _ = run(capsys, "global", "quadric")
    assert code == 0
    assert "global_p1  -1" in out


def test_env_override(capsys, tmp_path, monkeypatch):
    shutil.copy(corpus_dir() / "teardrop.json", tmp_path / "only.json")
    monkeypatch.setenv("LEFLOC_CORPUS", str(tmp_path))
    code, out, _ = run(capsys, "verify")
    assert code == 0 and "# teardrop: verify" in out and "quadric" not in out


def test_failing_expectation_exit_1(capsys, tmp_path):
    data = json.loads((corpus_dir() / "teardrop.json").read_text())
    data["expectations"].append("global_p0 == 2")
    p = tmp_path / "t.json"
    p.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", str(p))
    assert code == 1
    assert "FAIL  global_p0 == 2" in out


@pytest.mark.parametrize("argv", [["local", "missing.json"], ["expand", "cusp_vaps"],
                                  ["local", "quadric", "--point", "zz"],
                                  ["spin", "teardrop"], ["local", "quadric", "teardrop"]])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("lefloc: error:")


def test_bad_json_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    code, _, err = run(capsys, "verify", str(p))
    assert code == 2 and "line 1" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "quadric"])
    assert exc.value.code == 2


def _text_values(out):
    rows = {}
    for line in out.splitlines()[1:]:
        if not line:
            break  # verify appends a summary after a blank line
        if line.startswith(("PASS  ", "FAIL  ")):
            line = line[6:]
        key, _, value = line.partition("  ")
        rows[key.strip()] = value.strip().split("    (")[0]
    return rows


CASES = [("local", "quadric"), ("global", "depth2"), ("chi-y", "quadric"),
         ("invariants", "quadric"), ("spin", "quadric"), ("morse", "conifold"),
         ("complexlab", "torus_rotation"), ("verify", "cusp_max"),
         ("expand", "cusp_max", "--point", "a", "--order", "4", "--region", "outside")]


@pytest.mark.parametrize("case", CASES, ids=[c[0] + "-" + c[1] for c in CASES])
def test_text_and_json_agree(capsys, case):
    code, text, _ = run(capsys, *case)
    assert code == 0
    code, js, _ = run(capsys, *case, "--json")
    assert code == 0
    doc = json.loads(js)
    assert doc["command"] == case[0]
    text_rows = _text_values(text)
    assert list(text_rows) == [r["key"] for r in doc["results"]]
    for r in doc["results"]:
        assert text_rows[r["key"]] == r["text"]


def test_every_command_is_handled():
    from lefloc.cli import HANDLERS
    assert set(HANDLERS) | {"verify"} == set(COMMANDS)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "lefloc", "global", "teardrop"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "global_p0  1" in res.stdout
