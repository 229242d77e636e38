import json

import pytest

from prolongation_lab.cli import THREADS_ENV, main, parse_grid, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_commutators_pass(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2", "--m", "1", "--k", "1", "--l", "1", "--suite", "commutators")
    assert code == 0
    assert out.splitlines()[-1].startswith("PASS")


@pytest.mark.parametrize("argv", [
    ["verify", "--n", "2", "--l", "2"],
    ["verify", "--k", "0"],
    ["verify", "--suite", "nonsense"],
    ["verify", "--grid", "nmax=1"],
    ["verify", "--grid", "pmax=2"],
    ["verify", "--seed", "-1"],
    ["dims", "--n", "3", "--l", "3"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:") and not out


def test_schema_default(capsys):
    code, out, _ = run(capsys)
    assert code == 0
    schema = json.loads(out)
    assert "reports" in schema["properties"]
    code, text, _ = run(capsys, "schema", "--format", "text")
    assert code == 0 and text.strip()
    with pytest.raises(json.JSONDecodeError):
        json.loads(text)
    assert run(capsys, "--format", "text")[1] == text


def test_json_report_and_determinism(capsys, tmp_path):
    argv = ["verify", "--n", "3", "--l", "2", "--k", "1", "--samples", "2", "--seed", "7"]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--json", str(p1)]) == 0
    assert main(argv + ["--json", str(p2)]) == 0
    capsys.readouterr()
    assert p1.read_bytes() == p2.read_bytes()
    data = json.loads(p1.read_text())
    assert data["status"] == "pass" and data["failures"] == 0
    assert [r["claim"] for r in data["reports"]] == [
        "commutators", "prolongation", "polar", "pasting", "stabilization", "oracle"]
    code, out, _ = run(capsys, *argv, "--json", "-")
    assert code == 0 and json.loads(out) == data


def test_seed_changes_samples(capsys):
    outs = []
    for seed in ("1", "2"):
        code, out, _ = run(capsys, "verify", "--suite", "pasting", "--samples", "2", "--seed", seed, "--format", "json")
        assert code == 0
        outs.append(json.loads(out)["seed"])
    assert outs == [1, 2]


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "l": 2, "k": 2, "samples": 1, "suite": "commutators"}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--k", "1", "--format", "json")
    assert code == 0
    params = json.loads(out)["reports"][0]["parameters"]
    assert (params["n"], params["l"], params["k"]) == (3, 2, 1)
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "verify", "--config", str(cfg))[0] == 2
    assert run(capsys, "verify", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--n", "3", "--m", "1", "--k", "2", "--l", "2", "--format", "json")
    assert code == 0
    table = json.loads(out)
    assert [row["dim"] for row in table["levels"]] == [2, 6, 9, 11, 12]
    code, text, _ = run(capsys, "dims")
    assert code == 0 and "dim M^q" in text


def test_parse_grid():
    grid = parse_grid("nmax=3,mmax=2,kmax=2")
    assert len(grid) == 12
    assert all(1 <= l < n for n, _, _, l in grid)
    with pytest.raises(UsageError):
        parse_grid("nmax=x")


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "2")
    code, out, _ = run(capsys, "verify", "--suite", "commutators,oracle", "--samples", "1", "--format", "json")
    assert code == 0
    monkeypatch.setenv(THREADS_ENV, "1")
    assert run(capsys, "verify", "--suite", "commutators,oracle", "--samples", "1", "--format", "json")[1] == out
    monkeypatch.setenv(THREADS_ENV, "many")
    assert run(capsys, "verify")[0] == 2


def test_failure_exit_code(capsys, monkeypatch):
    from prolongation_lab import suites
    from prolongation_lab.report import Report

    def broken(frame, rng, samples):
        report = Report("commutators", frame.as_dict())
        report.check(False, claim="forced")
        return report

    monkeypatch.setitem(suites.SUITES, "commutators", broken)
    code, out, _ = run(capsys, "verify", "--suite", "commutators")
    assert code == 1 and out.splitlines()[-1].startswith("FAIL")


def test_grid_run(capsys, tmp_path):
    out_path = tmp_path / "out.json"
    code = main(["verify", "--grid", "nmax=3,mmax=1,kmax=1", "--suite", "all", "--seed", "42",
                 "--samples", "2", "--json", str(out_path)])
    capsys.readouterr()
    assert code == 0
    data = json.loads(out_path.read_text())
    assert len(data["reports"]) == 3 * 6
