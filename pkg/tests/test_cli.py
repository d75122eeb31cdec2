import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from fracnodal.cli import dumps, main, parse_radii


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_poly_verify(capsys):
    code, out, _ = run(capsys, "poly", "--family", "even", "--k", "4", "--a", "1/3", "--verify")
    doc = json.loads(out)
    assert code == 0 and doc["residual"] == "0"
    assert doc["header"] == {"a": "1/3", "n": 1, "parity": "even"}


def test_poly_bad_parity(capsys):
    code, _, err = run(capsys, "poly", "--family", "even", "--k", "3")
    assert code == 2 and "k:" in err


def test_frequency_csv(capsys, tmp_path):
    code, _, _ = run(capsys, "frequency", "--field", "poly:even:4", "--a", "1/3",
                     "--radii", "geometric:1,0.01,8", "--out", str(tmp_path))
    assert code == 0
    table = np.genfromtxt(tmp_path / "frequency.csv", delimiter=",", names=True)
    assert table.dtype.names == ("r", "H", "E", "N", "W_k", "M")
    assert np.max(np.abs(table["N"] - 4)) <= 1e-8
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["monotone"] and verdict["k"] == 4


def test_negative_a_and_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"field": "poly:even:2", "a": "-1/2", "radii": "0.25,0.5,1"}))
    code, out, _ = run(capsys, "frequency", "--config", str(cfg))
    assert code == 0 and "2.0000000000000" in out
    # flags override the file
    code, out, _ = run(capsys, "frequency", "--config", str(cfg), "--a", "-1/4", "--field", "poly:odd:3")
    assert code == 0 and json.loads(out[out.index("{"):])["k"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "frequency", "--config", str(cfg))
    assert code == 2 and "config.bogus" in err


def test_validation(capsys):
    assert run(capsys, "report", "--a", "1")[0] == 2
    assert run(capsys, "solve", "--N", "2")[0] == 2
    assert run(capsys, "check-frac", "--tol", "0")[0] == 2
    assert run(capsys, "extend", "--s", "1.5")[0] == 2
    assert run(capsys, "nosuch")[0] == 2


def test_report(capsys):
    code, out, _ = run(capsys, "report", "--n", "1", "--a", "0")
    doc = json.loads(out)
    assert doc["sphere_measure"] == pytest.approx(2 * np.pi)
    assert doc["C_ns"] == pytest.approx(1 / np.pi)


def test_extend_and_check_frac(capsys):
    code, out, _ = run(capsys, "extend", "--datum", "poly:1", "--s", "1/4", "--x", "0,0.5", "--y", "0.3")
    assert code == 0
    assert all(abs(p["value"] - 1) < 1e-10 for p in json.loads(out)["points"])
    code, out, _ = run(capsys, "check-frac", "--s", "1/2", "--x", "0.3")
    assert code == 0 and json.loads(out)["pass"]


def test_solve_is_deterministic(capsys, tmp_path):
    for d in ("a", "b"):
        code, _, _ = run(capsys, "solve", "--data", "poly:even:2", "--a", "1/3", "--N", "17",
                         "--out", str(tmp_path / d))
        assert code == 0
    assert (tmp_path / "a" / "field.bin").read_bytes() == (tmp_path / "b" / "field.bin").read_bytes()
    doc = json.loads((tmp_path / "a" / "solve.json").read_text())
    assert doc["residual"] < 1e-10 and doc["max_principle"]


def test_solve_recipe(capsys, tmp_path):
    code, _, _ = run(capsys, "solve", "--data", "recipe:grid_antisym", "--a", "1/3", "--N", "17",
                     "--out", str(tmp_path))
    assert code == 0
    assert json.loads((tmp_path / "field.csv.json").read_text())["parity"] == "antisymmetric"


def test_blowup(capsys):
    code, out, _ = run(capsys, "blowup", "--field", "corpus:odd_base", "--a", "1/3")
    doc = json.loads(out)
    assert code == 0 and doc["stratum"] == "regular-tangential"
    code, out, err = run(capsys, "blowup", "--field", "poly:even:2", "--a", "1/3", "--X0", "0,0", "--X0", "0.5,0")
    assert code == 3 and json.loads(err)["error"] == "NotANodalPoint"


def test_nodal(capsys, tmp_path):
    code, _, _ = run(capsys, "nodal", "--field", "harmonic:3", "--N", "201", "--out", str(tmp_path))
    doc = json.loads((tmp_path / "measure.json").read_text())
    assert code == 0 and doc["box_count"] == pytest.approx(6.0, rel=0.05)
    assert (tmp_path / "segments.csv").exists() and (tmp_path / "nodal.dat").exists()


def test_construct1d(capsys, tmp_path):
    code, _, _ = run(capsys, "construct1d", "--order", "2", "--s", "1/2", "--out", str(tmp_path))
    doc = json.loads((tmp_path / "report.json").read_text())
    assert code == 0 and doc["pass"] and doc["g"] == ["0/1", "0/1", "1/1", "0/1", "-2/1"]


def test_no_files_without_out(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "construct1d", "--order", "1", "--s", "1/4")
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(capsys, "nodal", "--field", "poly:odd:3", "--a", "0", "--N", "65")
    assert code == 0 and "box_count" in json.loads(out)
    assert list(tmp_path.iterdir()) == []


def test_check_frac_vanishing_output(capsys):
    # (-Delta)^s x^2 = 0: the floor turns the relative check into an absolute one
    code, out, _ = run(capsys, "check-frac", "--datum", "poly:0,0,1", "--s", "1/2", "--x", "0.3")
    assert code == 0 and json.loads(out)["pass"]


def test_corpus_list(capsys):
    code, out, _ = run(capsys, "corpus", "list", "--a", "1/3")
    assert code == 0 and "planar_even_2\texact" in out


def test_acceptance_subset(capsys):
    code, out, _ = run(capsys, "acceptance", "--criteria", "1,2")
    assert code == 0
    assert out.splitlines() == [l for l in out.splitlines() if l.startswith("criterion")]
    assert [l.split()[1:3] for l in out.splitlines()] == [["1", "PASS"], ["2", "PASS"]]


def test_helpers():
    assert list(parse_radii("0.5,0.25")) == [0.25, 0.5]
    r = parse_radii("geometric:1,0.01,3")
    assert r[0] == pytest.approx(0.01) and r[-1] == pytest.approx(1.0)
    assert dumps({"b": Fraction(1, 3), "a": 0.1}) == dumps({"a": 0.1, "b": Fraction(1, 3)})
    assert '"1/3"' in dumps(Fraction(1, 3))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fracnodal", "poly", "--k", "2", "--a", "-1/2", "--verify"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and '"residual": "0"' in res.stdout
