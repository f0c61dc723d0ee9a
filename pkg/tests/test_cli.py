"""Golden-file tests for every subcommand.

Regenerate goldens with ``DDVV_UPDATE_GOLDEN=1 pytest tests/test_cli.py``.
"""
import json
import math
import os
from pathlib import Path

import pytest

from ddvv.cli import main
from ddvv.documents import load

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"
UPDATE = os.environ.get("DDVV_UPDATE_GOLDEN") == "1"

# (golden name, argv, expected exit code)
CASES = [
    ("check_pair", ["check", "pair.json", "--output", "json"], 0),
    ("check_skew3", ["check", "skew3.json", "--output", "json"], 0),
    ("check_random", ["check", "random.json", "--output", "json"], 0),
    ("check_pair_text", ["check", "pair.json"], 0),
    ("geom_umbilic", ["geom", "umbilic.json", "--output", "json"], 0),
    ("geom_wintgen", ["geom", "wintgen.json", "--output", "json"], 0),
    ("geom_random", ["geom", "random_shape.json", "--output", "json"], 0),
    ("translate_pair", ["translate", "pair.json", "--output", "json"], 0),
    ("translate_zero", ["translate", "zero.json", "--output", "json"], 0),
    ("translate_random", ["translate", "random.json", "--output", "json"], 0),
    ("nf_pair_conj", ["normal-form", "pair_conj.json", "--output", "json"], 0),
    ("nf_skewquat_conj", ["normal-form", "skewquat_conj.json", "--output", "json"], 0),
    ("nf_zero", ["normal-form", "zero.json", "--output", "json"], 0),
    ("nf_random", ["normal-form", "random.json", "--output", "json"], 0),
    ("nf_shape_eq", ["normal-form", "shape_eq_conj.json", "--output", "json"], 0),
    ("search_ascend", ["search", "--n", "3", "--m", "3", "--trials", "4", "--seed", "7", "--output", "json"], 0),
    ("search_ascend_csv", ["search", "--n", "3", "--m", "3", "--trials", "4", "--seed", "7", "--output", "csv"], 0),
    ("search_fuzz", ["search", "--n", "3", "--m", "2", "--mode", "fuzz", "--trials", "100", "--seed", "7", "--output", "json"], 0),
    ("fmax_identity", ["fmax", "--n", "2", "--output", "json"], 0),
    ("fmax_bary", ["fmax", "--n", "2", "--epsilon", "0.3333333333333333", "--output", "json"], 0),
    ("fmax_haar", ["fmax", "--n", "2", "--q", "haar", "--seed", "3", "--output", "json"], 0),
    ("gen_sympair", ["gen", "--family", "sympair", "--n", "2", "--m", "2", "--mu", "1"], 0),
    ("gen_sympair_zero", ["gen", "--family", "sympair", "--n", "2", "--m", "2", "--mu", "0"], 0),
    ("gen_skewquat", ["gen", "--family", "skewquat", "--n", "4", "--m", "3", "--lam", "1", "--conjugate", "--seed", "5"], 0),
    ("gen_shape_eq", ["gen", "--family", "shape-eq", "--n", "3", "--m", "3", "--mu", "1", "--lam3", "2"], 0),
]

ERROR_CASES = [
    (["check", "malformed.json"], 2),
    (["check", "asym.json"], 2),
    (["check", "missing.json"], 2),
    (["check", "umbilic.json"], 2),
    (["geom", "pair.json"], 2),
    (["geom", "shape_n1.json"], 2),
    (["translate", "skew3.json"], 2),
    (["translate", "random_skew.json"], 2),
    (["fmax", "--n", "2", "--epsilon", "0.5"], 2),
    (["gen", "--family", "skew3", "--m", "2"], 2),
]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def close(a, b, tol=1e-9):
    if isinstance(a, float) or isinstance(b, float):
        if a is None or b is None:
            return a is b
        return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(close(a[k], b[k], tol) for k in a)
    if isinstance(a, list):
        return len(a) == len(b) and all(close(x, y, tol) for x, y in zip(a, b))
    return a == b


@pytest.fixture
def in_data(monkeypatch):
    monkeypatch.chdir(DATA)


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code, in_data, capsys):
    got_code, out = run(argv, capsys)
    assert got_code == code
    path = GOLDEN / name
    if UPDATE:
        path.write_text(out)
    expected = path.read_text()
    if out == expected:
        return
    # tolerate last-digit differences from a different BLAS/LAPACK build
    if expected.lstrip().startswith("{"):
        assert close(json.loads(out), json.loads(expected))
    else:
        assert out.splitlines()[0] == expected.splitlines()[0]
        assert len(out.splitlines()) == len(expected.splitlines())


@pytest.mark.parametrize("argv,code", ERROR_CASES, ids=[" ".join(a) for a, _ in ERROR_CASES])
def test_exit_codes(argv, code, in_data, capsys):
    assert main(argv) == code
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_deterministic(name, argv, code, in_data, capsys):
    assert run(argv, capsys) == run(argv, capsys)


def test_search_csv_file_identical(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    argv = ["search", "--n", "3", "--m", "2", "--trials", "100", "--seed", "7", "--mode", "fuzz"]
    main(argv + ["--out", "a.csv"])
    main(argv + ["--out", "b.csv"])
    capsys.readouterr()
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    lines = a.decode().splitlines()
    assert lines[0] == "trial,seed,ratio,defect,kind"
    assert len(lines) == 101


def test_search_finds_equality(in_data, capsys):
    code, out = run(["search", "--n", "3", "--m", "3", "--trials", "8", "--output", "csv"], capsys)
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert code == 0
    assert max(float(r[2]) for r in rows) >= 1 - 1e-6


def test_gen_then_check(tmp_path, capsys):
    f = tmp_path / "fix.json"
    assert main(["gen", "--family", "skewquat", "--n", "4", "--m", "3", "--lam", "1", "--out", str(f)]) == 0
    assert main(["check", str(f), "--output", "json"]) == 0
    res = json.loads(capsys.readouterr().out)["results"]
    assert res["ratio"] == pytest.approx(1.0, abs=1e-12)
    assert main(["gen", "--family", "sympair", "--mu", "0", "--out", str(f)]) == 0
    t, _ = load(f)
    assert not t.mats.any()


def test_document_roundtrip(tmp_path):
    from ddvv.documents import save
    from ddvv.matrix_core import random_tuple

    t = random_tuple(4, 3, seed=9)
    save(t, tmp_path / "t.json")
    t2, _ = load(tmp_path / "t.json")
    assert (t2.mats == t.mats).all() and t2.symmetry is t.symmetry
    save(t2, tmp_path / "t2.json")
    assert (tmp_path / "t.json").read_bytes() == (tmp_path / "t2.json").read_bytes()


def test_fmax_q_file(tmp_path, in_data, capsys):
    import numpy as np

    q = tmp_path / "q.json"
    q.write_text(json.dumps({"matrix": np.eye(3).tolist()}))
    assert main(["fmax", "--n", "2", "--q", "file", "--q-file", str(q), "--output", "json"]) == 0
    res = json.loads(capsys.readouterr().out)["results"]
    assert res["max_value"] == pytest.approx(-0.5, abs=1e-9)
    q.write_text(json.dumps({"matrix": (2 * np.eye(3)).tolist()}))
    assert main(["fmax", "--n", "2", "--q", "file", "--q-file", str(q)]) == 2


def test_help_lists_csv_columns(capsys):
    with pytest.raises(SystemExit):
        main(["search", "--help"])
    assert "trial, seed, ratio, defect, kind" in capsys.readouterr().out


def test_golden_values(in_data, capsys):
    """Spot values behind the goldens, asserted independently of the stored files."""
    _, out = run(["check", "pair.json", "--output", "json"], capsys)
    r = json.loads(out)["results"]
    assert (r["lhs"], r["bound"], r["defect"]) == (16.0, 16.0, 0.0)
    _, out = run(["geom", "wintgen.json", "--output", "json"], capsys)
    r = json.loads(out)["results"]
    assert r["ellipse_is_circle"] and abs(r["wintgen_defect"]) < 1e-12
    _, out = run(["geom", "umbilic.json", "--output", "json"], capsys)
    r = json.loads(out)["results"]
    assert r["rho"] == 1.0 and r["wintgen_defect"] == 0.0
    _, out = run(["geom", "random_shape.json", "--output", "json"], capsys)
    assert json.loads(out)["results"]["wintgen_defect"] > 0
    _, out = run(["translate", "pair.json", "--output", "json"], capsys)
    r = json.loads(out)["results"]
    assert sorted(round(x, 12) for x in r["spectrum"]) == [0.0, 2.0, 2.0]
    assert r["residual_norm"] < 1e-14 and r["residual_comm"] < 1e-13
    _, out = run(["normal-form", "pair_conj.json", "--output", "json"], capsys)
    r = json.loads(out)["results"]
    assert r["kind"] == "SymmetricPair" and r["parameter"] == pytest.approx(2.0, rel=1e-9)
    _, out = run(["normal-form", "zero.json", "--output", "json"], capsys)
    assert json.loads(out)["results"]["kind"] == "Zero"
    _, out = run(["normal-form", "random.json", "--output", "json"], capsys)
    assert json.loads(out)["results"]["kind"] == "NotEquality"
    _, out = run(["fmax", "--n", "2", "--output", "json"], capsys)
    assert json.loads(out)["results"]["max_value"] == pytest.approx(-0.5, abs=1e-9)
    _, out = run(["fmax", "--n", "2", "--epsilon", "0.3333333333333333", "--output", "json"], capsys)
    r = json.loads(out)["results"]
    # barycenter of the identity frame: x^t C x = 4/9, minus (sum x)^2 = 1
    assert r["max_value"] == pytest.approx(-5 / 9, abs=1e-12)
    _, out = run(["fmax", "--n", "2", "--q", "haar", "--seed", "3", "--output", "json"], capsys)
    assert json.loads(out)["results"]["member"] is True
    _, out = run(["search", "--n", "3", "--m", "2", "--mode", "fuzz", "--trials", "100", "--output", "json"], capsys)
    assert json.loads(out)["results"]["min_relative_defect"] >= -1e-9
