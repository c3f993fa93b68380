import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, FIXTURE_FILES
from tbound.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tchain_check(capsys):
    code, out, _ = run(capsys, "tchain", "check", "2", "5", "3")
    assert code == 0
    assert "d=1 n=5 a=3" in out


def test_tchain_check_rejects(capsys):
    code, out, _ = run(capsys, "tchain", "check", "2", "2", "2")
    assert code == 1


def test_tchain_enum_json(capsys):
    code, out, _ = run(capsys, "tchain", "enum", "--max-r", "3", "--json")
    chains = [tuple(c["chain"]) for c in json.loads(out)]
    assert code == 0 and (4,) in chains and (2, 5, 3) in chains and (3, 5, 2) in chains


def test_hj(capsys):
    code, out, _ = run(capsys, "hj", "100", "29")
    assert code == 0 and "4 2 6 2 2" in out


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.stem)
def test_verify_matches_expected(capsys, path):
    code, out, _ = run(capsys, "verify", str(path), "--json")
    assert code == 0
    expected = json.loads((FIXTURES / "expected" / path.name).read_text())
    assert json.loads(out) == expected


def test_verify_text(capsys):
    code, out, _ = run(capsys, "verify", str(FIXTURES / "c2_example.json"))
    assert code == 0 and "3 <= 3 TIGHT" in out


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", str(FIXTURES / "t24_example.json"))
    assert code == 0 and "T.2.4" in out


@pytest.mark.parametrize("stage", ["x", "s", "ei", "decorated"])
def test_dot_stages(capsys, stage):
    code, out, _ = run(capsys, "dot", str(FIXTURES / "c1_example.json"), "--stage", stage)
    assert code == 0 and out.startswith("graph ") and out.rstrip().endswith("}")
    if stage == "ei":
        assert "shape=box" in out


def test_optimal(capsys):
    code, out, _ = run(capsys, "optimal", "--n", "1", "--l", "2", "--verify")
    assert code == 0
    assert "r-d bound: 13 <= 13 TIGHT" in out


def test_bad_config(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"ks2": 0, "tchains": [[2, 2, 2]]}')
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and err
    code, _, _ = run(capsys, "verify", str(tmp_path / "missing.json"))
    assert code == 2


def test_unknown_command():
    proc = subprocess.run([sys.executable, "-m", "tbound", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_scan_small(capsys, tmp_path):
    out_file = tmp_path / "scan.json"
    code, _, _ = run(capsys, "scan", "classification", "--max-curves", "6", "--out", str(out_file))
    assert code == 0
    assert json.loads(out_file.read_text())["ok"] is True
