import json

import pytest

from tpx.cli import main, parse_grid
from tpx.ensembles import PermDistribution
from tpx.gaps import classical_gap


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_partitions_listing(capsys):
    code, out, err = run(capsys, "partitions", "--n", "2")
    assert code == 0 and out.splitlines() == ["1,2", "1|2"]
    code, out, _ = run(capsys, "partitions", "--n", "4")
    assert len(out.splitlines()) == 15
    code, _, err = run(capsys, "partitions", "--n", "13")
    assert code == 2 and "error" in err


def test_gap_lemma(capsys):
    code, out, _ = run(capsys, "gap", "lemma", "--n", "8", "--k", "2", "--method", "dense")
    r = json.loads(out)
    assert code == 0 and r["bound"] == "vacuous" and 0 < r["lambda"] < 1
    code, out, _ = run(capsys, "gap", "lemma", "--n", "16", "--k", "1")
    assert abs(json.loads(out)["lambda"]) < 1e-10
    code, _, _ = run(capsys, "gap", "lemma", "--n", "3", "--k", "2")
    assert code == 2


def test_gap_classical_matches_library(tmp_path, capsys):
    nu = PermDistribution.random(6, 3, seed=4)
    f = tmp_path / "perms.json"
    f.write_text(json.dumps(nu.to_dict()))
    code, out, _ = run(capsys, "gap", "classical", "--ensemble", str(f), "--copies", "2")
    assert code == 0
    assert json.loads(out)["lambda"] == classical_gap(nu, 2).lambda_measured


def test_missing_file_is_guard_error(capsys):
    code, _, err = run(capsys, "gap", "quantum", "--ensemble", "/nonexistent.json")
    assert code == 2 and "no such file" in err


def test_construct_and_design(tmp_path, capsys):
    perms = tmp_path / "perms.json"
    assert run(capsys, "perms", "--n", "4", "--d", "4", "--seed", "1", "-o", str(perms))[0] == 0
    ens_file = tmp_path / "ens.json"
    rep = tmp_path / "rep.json"
    code, _, err = run(
        capsys, "construct", "--ensemble", str(perms), "--k", "1", "--out-ensemble", str(ens_file), "-o", str(rep)
    )
    assert code == 0 and "measured eps_A" in err
    ens = json.loads(ens_file.read_text())
    assert len(ens["entries"]) == 5
    assert sum(e["weight"] for e in ens["entries"]) == pytest.approx(1.0, abs=1e-12)
    r = json.loads(rep.read_text())
    assert r["p"] == pytest.approx(1 / (1 + r["eps_c"]))

    code, out, _ = run(capsys, "design", "--ensemble", str(ens_file), "--epsilon", "1e-3", "--lambda", "0.5")
    d = json.loads(out)
    # lambda 0.5 understates this ensemble's gap, so the distance check fails
    assert d["m"] == 14 and "distance" in d and code == 4
    words = tmp_path / "w.json"
    code, out, _ = run(capsys, "design", "--ensemble", str(ens_file), "--epsilon", "1e-2", "--word-out", str(words))
    d = json.loads(out)
    assert code == 0 and d["distance"] <= 1e-2
    assert len(json.loads(words.read_text())) == d["m"]


def test_design_without_distance_when_large(tmp_path, capsys):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"n": 9, "k": 2, "entries": [{"op": {"type": "fourier"}, "weight": 1.0}]}))
    code, out, _ = run(capsys, "design", "--ensemble", str(f), "--epsilon", "0.1", "--lambda", "0.9")
    assert code == 0 and "distance" not in json.loads(out)


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "mobius", "--n-max", "6")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "verify", "--suite", "lemmas", "--k-max", "2", "--n-max", "8")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--suite", "mobius", "--n-max", "4", "--perturb", "closed form n=3")
    assert code == 4 and "first failure: mobius closed form n=3" in out
    code, _, _ = run(capsys, "verify", "--suite", "bogus")
    assert code == 2


def test_sweep(capsys, tmp_path):
    out_file = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "lemma", "--k", "2", "--n", "16:4096:x4", "-o", str(out_file))
    lines = out_file.read_text().splitlines()
    assert code == 0 and lines[0] == "n,k,method,lambda,bound,runtime_ms"
    rows = [l.split(",") for l in lines[1:]]
    assert [int(r[0]) for r in rows] == [16, 64, 256, 1024, 4096]
    lam = [float(r[3]) for r in rows]
    assert all(b <= a * 1.1 for a, b in zip(lam, lam[1:]))
    code, out, _ = run(capsys, "sweep", "lemma", "--k", "2", "--n", "3,8")
    assert "error:UnsupportedRegimeError" in out.splitlines()[1]


def test_parse_grid():
    assert parse_grid("16:4096:x4") == [16, 64, 256, 1024, 4096]
    assert parse_grid("5,6,8") == [5, 6, 8]


def test_seed_env_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("TPX_SEED", "5")
    a = run(capsys, "perms", "--n", "6", "--d", "2")[1]
    b = run(capsys, "perms", "--n", "6", "--d", "2", "--seed", "5")[1]
    c = run(capsys, "perms", "--n", "6", "--d", "2", "--seed", "6")[1]
    assert a == b != c
