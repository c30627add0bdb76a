import json

import pytest

from khfloer.cli import dims_from_json, main, matrix_from_json
from khfloer.corpus import CORPUS_DIR
from khfloer.invariants import PageReport, SInvariant, kh_dims
from khfloer.diagram import parse_diagram

TREFOIL = "braid(2): s1 s1 s1"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kh_unknot(capsys):
    code, out, _ = run(capsys, "kh", "U[1]")
    assert code == 0
    assert json.loads(out) == {"(0,-1)": 1, "(0,1)": 1}


def test_kh_reduced(capsys):
    code, out, _ = run(capsys, "kh", "--reduced", "U[1] base=1")
    assert json.loads(out) == {"(0,0)": 1}


def test_kh_round_trip_and_formats(capsys):
    code, out, _ = run(capsys, "kh", TREFOIL)
    assert dims_from_json(json.loads(out)) == kh_dims(parse_diagram(TREFOIL))
    code, out, _ = run(capsys, "kh", "--format", "poincare", TREFOIL)
    assert out.strip() == "q + q^3 + t^2*q^5 + t^2*q^7 + t^3*q^7 + t^3*q^9"
    code, out, _ = run(capsys, "kh", "--format", "table", TREFOIL)
    assert code == 0 and "q\\h" in out


def test_kh_from_file(capsys):
    code, out, _ = run(capsys, "kh", str(CORPUS_DIR / "trefoil+.pd"))
    assert dims_from_json(json.loads(out)) == kh_dims(parse_diagram(TREFOIL))


def test_pages(capsys):
    code, out, _ = run(capsys, "pages", "--theory", "bar-natan", TREFOIL)
    r = PageReport.from_json(json.loads(out))
    assert r.total(r.stabilization_index) == 2
    assert PageReport.from_json(r.to_json()) == r
    code, out, _ = run(capsys, "pages", "--theory", "d_a:111", TREFOIL)
    r = PageReport.from_json(json.loads(out))
    assert r.bigraded(2) == kh_dims(parse_diagram(TREFOIL))
    code, out, _ = run(capsys, "pages", "--theory", "ladybug", "U[1]")
    r = PageReport.from_json(json.loads(out))
    assert r.page(2) == r.page(r.stabilization_index)


def test_s(capsys):
    code, out, _ = run(capsys, "s", TREFOIL)
    assert (code, out.strip()) == (0, "2")
    code, out, _ = run(capsys, "s", "--format", "json", TREFOIL)
    assert SInvariant.from_json(json.loads(out)).value == 2


def test_movie(capsys):
    code, out, _ = run(capsys, "movie", str(CORPUS_DIR / "movies" / "birth-merge.mov"), "--theory", "kh", "--page", "2")
    data = json.loads(out)
    assert code == 0 and data["identity"]
    m = matrix_from_json(data)
    assert m.shape == tuple(data["shape"])


def test_verify(capsys, monkeypatch):
    monkeypatch.setenv("KHFLOER_JOBS", "2")
    code, out, _ = run(capsys, "verify", "--theory", "ladybug", "--max-crossings", "3", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert all(a["passed"] for a in report["axioms"].values())


def test_exit_codes(capsys, monkeypatch):
    code, _, err = run(capsys, "pages", "--theory", "bogus", "U[1]")
    assert code == 2 and "ladybug" in err and "bar-natan" in err
    assert run(capsys, "kh", "PD[X[1,2")[0] == 2
    assert run(capsys, "s", "braid(2): s1 s1")[0] == 3
    assert run(capsys, "movie", "/nonexistent.mov")[0] == 2
    monkeypatch.setenv("KHFLOER_JOBS", "many")
    assert run(capsys, "kh", "U[1]")[0] == 2


def test_integrity_exit_code(capsys, tmp_path, monkeypatch):
    import khfloer.theories as th

    def broken(t, corpus, seed=0):
        return {"theory": "kh", "axioms": {"unlink_collapse": {"passed": False, "failures": ["x"], "notes": []}}}

    monkeypatch.setattr(th, "verify_kf_axioms", broken)
    code, out, _ = run(capsys, "verify", "--max-crossings", "0")
    assert code == 4 and "FAIL" in out


def test_verify_ladybug_full_corpus(capsys):
    code, out, _ = run(capsys, "verify", "--theory", "ladybug", str(CORPUS_DIR))
    assert code == 0 and "FAIL" not in out
