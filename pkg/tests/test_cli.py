import json
import subprocess
import sys

import pytest

from nilhom import ENGINE_VERSION
from nilhom.cli import ProfileCache, main
from nilhom.homology import HomologyProfile


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_n2(capsys):
    code, out, _ = run(capsys, "table", "--n", "2")
    assert code == 0
    assert out.splitlines()[1:] == ["    0   Z", "    1   Z"]


def test_table_verify(capsys):
    code, out, err = run(capsys, "table", "--n", "4", "--verify")
    assert code == 0 and "verified" in err
    assert "Z^5 + Z_2" in out


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--n", "5", "--format", "json")
    data = json.loads(out)
    assert data["n"] == 5 and data["rows"][4]["free_rank"] == 20


def test_table_n9_resource_limit(capsys):
    code, _, err = run(capsys, "table", "--n", "9")
    assert code == 3
    assert "unfinished 5,5,5,5,5,5,5,5,5" in err


def test_table_mismatch_exit(capsys, monkeypatch):
    import nilhom.cli as cli
    monkeypatch.setattr(cli, "verify_against_paper", lambda t: ["H_1: free rank 0, expected 1"])
    code, _, err = run(capsys, "table", "--n", "3", "--verify")
    assert code == 2 and "mismatch" in err


def test_bad_input(capsys):
    assert run(capsys, "summand", "--w", "1,1")[0] == 4
    assert run(capsys, "summand", "--w", "a,b")[0] == 4
    assert run(capsys, "table", "--n", "1")[0] == 4
    assert run(capsys, "orbit", "--w", "0,3,3")[0] == 4


def test_summand_views(capsys):
    assert run(capsys, "summand", "--w", "2,3,2,3", "--show", "profile")[1].strip() == "H_2 = Z_2"
    assert run(capsys, "summand", "--w", "2,2,2")[1].strip() == "0"
    out = run(capsys, "summand", "--w", "2,4,7,5,4,2,5,7", "--show", "basis")[1]
    assert out.splitlines()[0] == "192 monomials" and len(out.splitlines()) == 193
    out = run(capsys, "summand", "--w", "2,2,2", "--show", "boundary")[1]
    assert "d e12e23 = -1*e13" in out
    out = run(capsys, "summand", "--w", "2,3,4,2,4", "--show", "trace")[1]
    assert "cone_two_two" in out and out.strip().endswith("H_3 = Z_3")


def test_orbit(capsys):
    out = run(capsys, "orbit", "--w", "3,2,3,2")[1]
    assert "canonical  2,3,2,3" in out and "shift      +1" in out
    out = run(capsys, "orbit", "--w", "2,3,3,3,4")[1]
    assert "beta-fixed yes" in out
    out = run(capsys, "orbit", "--w", "1,2,3")[1]
    assert "canonical  1,2,3" in out and "(permutation)" in out


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "examples")
    assert code == 0 and "FAIL" not in out


def test_verify_tables(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "tables", "--n-max", "5")
    assert code == 0 and out.count("[PASS]") == 4 * 5


def test_cache_roundtrip(tmp_path, capsys):
    cold = run(capsys, "table", "--n", "5", "--cache-dir", str(tmp_path))
    files = list(tmp_path.rglob("*.json"))
    assert files and not list(tmp_path.rglob("*.tmp"))
    warm = run(capsys, "table", "--n", "5", "--cache-dir", str(tmp_path))
    assert cold == warm


def test_cache_env_and_version(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("NILHOM_CACHE_DIR", str(tmp_path))
    run(capsys, "table", "--n", "4")
    store = ProfileCache(tmp_path)
    assert store.get((2, 3, 2, 3)) == (HomologyProfile.from_dict({2: (0, [2])}), "cone_two_two > Cone(2, 2,1,3)")
    path = next(tmp_path.rglob("w_2_3_2_3.json"))
    doc = json.loads(path.read_text())
    doc["engine"] = ENGINE_VERSION + "-old"
    path.write_text(json.dumps(doc))
    assert store.get((2, 3, 2, 3)) is None


def test_deterministic_output(capsys):
    a = run(capsys, "table", "--n", "6", "--format", "json")
    b = run(capsys, "table", "--n", "6", "--format", "json")
    assert a == b


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nilhom", "table", "--n", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and "Z^2" in res.stdout
