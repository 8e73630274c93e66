import json

import pytest

from metric_distortion import fixtures
from metric_distortion.certificate import load_appendix_b
from metric_distortion.cli import main


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, text):
        f = tmp_path / name
        f.write_text(text)
        paths[name] = str(f)

    put("fixture.txt", fixtures.PROFILE_TEXT)
    put("q.json", json.dumps(fixtures.Q_STAR))
    put("one.txt", "candidates: a\n2 : a\n")
    put("un.txt", "candidates: a b c\n1 : a b c\n2 : a c b\n")
    put("bad.txt", "candidates: a b\n1 : a a\n")
    put("qa.txt", "a 1\n")
    put("qb.json", '{"a": 0.5, "b": 0.5}')
    put("qbad.json", '{"a": 0.7}')
    put("cert.json", json.dumps(load_appendix_b().to_json()))
    put("big.json", json.dumps(load_appendix_b().scaled(2).to_json()))
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    lines = [json.loads(l) for l in out.out.splitlines() if l.startswith(("{", "["))]
    return code, lines, out


def test_solve(capsys, files):
    code, lines, _ = run(capsys, "solve", files["one.txt"])
    assert code == 0 and lines[0]["gamma"] == 1.0 and lines[0]["dual_phi"] == 1.0


def test_solve_fixture(capsys, files):
    code, lines, _ = run(capsys, "solve", files["fixture.txt"], "--no-dual")
    assert code == 0 and abs(lines[0]["gamma"] - fixtures.GAMMA_STAR) <= 1e-5
    assert lines[0]["q"]["c"] == 0.388299


def test_malformed_profile(capsys, files):
    code, _, out = run(capsys, "solve", files["bad.txt"])
    assert code == 2 and "line 2" in out.err and "duplicate" in out.err
    code, _, _ = run(capsys, "solve", str(files["dir"] / "missing.txt"))
    assert code == 2


def test_adversary(capsys, files):
    code, lines, _ = run(capsys, "adversary", files["fixture.txt"], files["q.json"])
    assert code == 0 and abs(lines[0]["value"] - fixtures.GAMMA_STAR) <= 1e-5
    code, lines, _ = run(capsys, "adversary", files["un.txt"], files["qa.txt"])
    assert lines[0]["value"] == 1.0 and not lines[0]["unbounded"]
    code, lines, _ = run(capsys, "adversary", files["un.txt"], files["qb.json"])
    assert code == 0 and lines[0]["unbounded"] and lines[0]["value"] is None
    code, lines, _ = run(capsys, "adversary", files["un.txt"], files["qb.json"], "--o", "b")
    assert lines[0]["o_star"] == "b" and lines[0]["value"] == 1.0
    code, _, _ = run(capsys, "adversary", files["un.txt"], files["qbad.json"])
    assert code == 2
    code, _, _ = run(capsys, "adversary", files["un.txt"], files["qa.txt"], "--o", "z")
    assert code == 2


def test_verify_cert(capsys, files):
    code, lines, _ = run(capsys, "verify-cert", files["cert.json"])
    assert code == 0 and lines[0]["feasible"] and abs(lines[0]["phi"] - fixtures.GAMMA_STAR) <= 5e-4
    code, lines, _ = run(capsys, "verify-cert", files["big.json"])
    assert code == 1 and not lines[0]["feasible"] and lines[0]["normalization_slack"] < 0
    code, lines, _ = run(capsys, "verify-cert", files["cert.json"], "--rational")
    assert code == 0 and lines[0]["normalization"] == 0.999992


def test_mode_env(capsys, files, monkeypatch):
    monkeypatch.setenv("METRIC_DISTORTION_MODE", "bogus")
    code, _, _ = run(capsys, "verify-cert", files["cert.json"])
    assert code == 2


def test_dual_writes_certificate(capsys, files):
    p = files["dir"] / "p.txt"
    p.write_text("candidates: a b c\n1 : a b c\n1 : b c a\n1 : c a b\n")
    out = str(files["dir"] / "c.json")
    code, lines, _ = run(capsys, "dual", str(p), "--certificate-out", out)
    assert code == 0 and lines[0]["feasible"]
    code, again, _ = run(capsys, "verify-cert", out)
    assert code == 0 and again[0]["phi"] == lines[0]["phi"]


def test_baseline(capsys, files):
    code, _, out = run(capsys, "baseline", files["one.txt"])
    assert code == 0 and "random-dictatorship" in out.out
    code, lines, _ = run(capsys, "baseline", files["one.txt"], "--json", "--precision", "3")
    assert [r["distortion"] for r in lines[0]] == [1.0, 1.0, 1.0]


def test_search(capsys, files):
    code, lines, _ = run(capsys, "search", "--m", "2", "--max-groups", "2", "--threshold", "1.5")
    assert code == 0
    assert lines[-1]["summary"]["best_gamma"] == 2.0 and lines[-1]["summary"]["hits"] == 1
    assert len(lines) == 2
    code, _, _ = run(capsys, "search", "--m", "0")
    assert code == 2


def test_precision_flag(capsys, files):
    code, lines, _ = run(capsys, "adversary", files["fixture.txt"], files["q.json"], "--precision", "2")
    assert lines[0]["value"] == 2.06


@pytest.mark.slow
def test_reproduce_paper(capsys):
    code, lines, _ = run(capsys, "reproduce-paper", "--rational")
    assert code == 0
    items = {l["item"]: l for l in lines if "item" in l}
    assert all(l["ok"] for l in items.values())
    assert items["certificate"]["rational_feasible"]
    assert items["multipliers"]["violations_as_printed"] == 13


@pytest.mark.slow
def test_reproduce_paper_strict_modes(capsys):
    code, lines, _ = run(capsys, "reproduce-paper", "--tolerance", "1e-12")
    assert code == 1
    items = {l["item"]: l for l in lines if "item" in l}
    assert not items["multipliers"]["ok"] and items["multipliers"]["tol"] == 1e-12
    code, lines, _ = run(capsys, "reproduce-paper", "--as-printed")
    assert code == 1
