from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from mpst_es.cli import FAILED, INVALID, OK, USAGE, main

SESSIONS = Path(__file__).resolve().parent.parent / "sessions"


def cli(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def f(name):
    return SESSIONS / f"{name}.mpst"


def test_check():
    assert cli("check", f("chain"), "--network", "Chain", "--global", "Chain") == (OK, "typed\n")
    code, text = cli("check", f("stream"), "--network", "Wake", "--global", "Wake")
    assert code == FAILED and text.startswith("not typed")


def test_project():
    code, text = cli("project", f("chain"), "--global", "Chain", "--participant", "q")
    assert code == OK and "p?l1" in text and "r!l2" in text
    code, text = cli("project", f("chain"), "--global", "Chain", "--participant", "q", "--json")
    assert json.loads(text) == {"defined": True, "process": "p?l1;r!l2;0"}


def test_events_listing():
    code, text = cli("events", f("chain"), "--network", "Chain")
    assert code == OK
    assert text.splitlines()[-1] == "3 events (bound 2, exact: true)"
    assert "flow: e0<e1, e1<e2" in text


def test_events_json_is_stable():
    args = ("events", f("fork"), "--global", "Fork", "--json")
    first, second = cli(*args), cli(*args)
    assert first == second and first[0] == OK
    data = json.loads(first[1])
    assert data["exact"] and len(data["events"]) == 8
    assert list(data) == sorted(data)


def test_events_dot():
    code, text = cli("dot", f("fork"), "--network", "Fork")
    assert code == OK and text.startswith("digraph")
    code, _ = cli("events", f("fork"), "--network", "Fork", "--dot", "--json")
    assert code == USAGE


def test_deadlock_has_only_the_empty_configuration():
    code, text = cli("configs", f("ring"), "--network", "Ring")
    assert code == OK
    assert text.splitlines() == ["∅", "1 configuration (bound 2, exact: true)"]


def test_recursive_input_needs_a_bound():
    code, _ = cli("events", f("stream"), "--network", "Stream")
    assert code == USAGE
    code, text = cli("configs", f("stream"), "--network", "Stream", "--bound", "2")
    assert code == OK and "exact: false" in text


def test_run():
    code, text = cli("run", f("chain"), "--network", "Chain", "--trace", "p->q:l1")
    assert code == OK and "r!l2" in text
    code, text = cli("run", f("chain"), "--network", "Chain", "--trace",
                     "p->q:l1,r->s:l3", "--json")
    data = json.loads(text)
    assert code == FAILED and data["ok"] is False and data["index"] == 1


def test_iso():
    code, text = cli("iso", f("fork"), "--network", "Fork", "--global", "Fork")
    assert code == OK
    assert "11 configurations on each side (bound 4, exact: true)" in text


def test_verify_file():
    code, text = cli("verify", f("stream"), "--network", "Stream", "--global", "Stream",
                     "--bound", "4")
    assert code == OK
    assert [line.split(":")[0] for line in text.splitlines()] == \
        ["subject-reduction", "session-fidelity", "progress", "isomorphism"]
    code, text = cli("verify", f("stream"), "--network", "Swapped", "--global", "Stream",
                     "--property", "sr", "--json")
    assert code == FAILED
    (report,) = json.loads(text)
    assert report["verdict"] == "fail" and "counterexample" in report


def test_verify_random():
    code, text = cli("verify", "--random", "--seeds", "3", "--count", "2", "--size", "3",
                     "--bound", "3", "--max-len", "3")
    assert code == OK and text.splitlines()[-1] == "2 pairs"


def test_invalid_input(tmp_path):
    bad = tmp_path / "bad.mpst"
    bad.write_text("network N = p :: q!l |")
    assert cli("check", bad, "--network", "N", "--global", "G")[0] == INVALID
    mixed = tmp_path / "mixed.mpst"
    mixed.write_text("process P = +{q!l; 0, r?m; 0}")
    assert cli("events", mixed, "--process", "P")[0] == INVALID


def test_usage_errors(tmp_path):
    assert cli()[0] == USAGE
    assert cli("frobnicate")[0] == USAGE
    assert cli("check", tmp_path / "missing.mpst", "--network", "N", "--global", "G")[0] == USAGE
    assert cli("check", f("chain"), "--network", "Nope", "--global", "Chain")[0] == USAGE
    assert cli("events", f("chain"), "--network", "Chain", "--global", "Chain")[0] == USAGE
    assert cli("verify")[0] == USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mpst_es", "check", str(f("chain")),
         "--network", "Chain", "--global", "Chain"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "typed\n"


@pytest.mark.parametrize("name", ["chain", "ring", "stream", "fork", "swap"])
def test_session_files_parse(name):
    from mpst_es.surface import parse_file

    parse_file(f(name).read_text())


def test_complete_structures_list_every_configuration():
    # events are all within the default bound, but the largest configuration is not
    code, text = cli("configs", f("chain"), "--network", "Chain")
    assert code == OK and text.splitlines()[-1] == "4 configurations (bound 2, exact: true)"
    code, text = cli("iso", f("chain"), "--network", "Chain", "--global", "Chain", "--bound", "2")
    assert code == OK and "(bound 2, exact: false)" in text
