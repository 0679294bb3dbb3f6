import json

import numpy as np
import pytest

from weightlab.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main
from weightlab.space import make_dyadic_space, space_to_json
from weightlab.trace import STATEMENTS, missing_tests, trace


@pytest.fixture
def files(tmp_path):
    space, basis = make_dyadic_space(3)
    rng = np.random.default_rng(0)
    paths = {"space": tmp_path / "space.json", "w": tmp_path / "w.json", "v": tmp_path / "v.json",
             "f": tmp_path / "f.json", "h": tmp_path / "h.json"}
    paths["space"].write_text(space_to_json(space, basis))
    for key in ("w", "v"):
        paths[key].write_text(json.dumps(np.exp(rng.normal(size=8)).tolist()))
    for key in ("f", "h"):
        paths[key].write_text(json.dumps(rng.normal(size=8).tolist()))
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_space_validate(files, tmp_path, capsys):
    code, out, _ = run(capsys, "space", "validate", files["space"])
    assert code == EXIT_OK and json.loads(out)["ok"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"masses": [1, 1], "basis": [[0], [1]]}))
    code, out, _ = run(capsys, "space", "validate", bad)
    assert code == EXIT_FAIL and json.loads(out)["failing_pair"] == [0, 1]


def test_exponents_solve(capsys):
    code, out, _ = run(capsys, "exponents", "solve", "--q0", "2", "--p0", "2/3", "--s0", "1", "--r0", "inf",
                       "--q", "inf")
    data = json.loads(out)
    assert code == EXIT_OK
    assert (data["tuple"]["p"], data["tuple"]["s"], data["tuple"]["r"]) == ("1", "2", "2")
    assert data["in_region"] is True
    code, out, _ = run(capsys, "exponents", "solve", "--q0", "2", "--q", "1", "--p0", "2", "--p", "4")
    assert code == EXIT_FAIL and "over-determined" in json.loads(out)["error"]


def test_char_and_maxop(files, capsys):
    code, out, _ = run(capsys, "char", "--space", files["space"], "--w", files["w"], "--v", files["v"],
                       "--s", "2", "--r", "inf")
    assert code == EXIT_OK and json.loads(out)["value"] > 0
    code, out, _ = run(capsys, "maxop", "--space", files["space"], "--w", files["w"], "--v", files["v"],
                       "--p", "inf")
    assert code == EXIT_OK and json.loads(out)["kind"] == "exact"
    code, out, _ = run(capsys, "maxop", "--space", files["space"], "--w", files["w"], "--p", "2",
                       "--restarts", "4", "--iterations", "50")
    data = json.loads(out)
    assert data["kind"] == "lower_bound" and data["value"] <= data["upper_bound"]


def test_rdf(files, tmp_path, capsys):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"p0": "2/3", "s0": 1, "r0": "inf", "u0": "2/3", "gamma": "-1/2"}))
    code, out, _ = run(capsys, "rdf", "--space", files["space"], "--params", params, "--w", files["w"],
                       "--f", files["f"], "--h", files["h"], "--restarts", "4", "--iterations", "100")
    data = json.loads(out)
    assert code == EXIT_OK and data["ok"] and len(data["w0"]) == 8
    params.write_text(json.dumps({"p0": 2}))
    code, _, err = run(capsys, "rdf", "--space", files["space"], "--params", params, "--w", files["w"],
                       "--f", files["f"], "--h", files["h"])
    assert code == EXIT_CONFIG and "'s0'" in err


CONFIG = """
seed = 7
[space]
kind = "dyadic"
levels = 3
[operator]
name = "product2"
[exponents]
q0 = "1"
p0 = ["2", "2"]
s0 = ["2", "2"]
r0 = ["2", "2"]
gamma = ["1/4", "1/4"]
[sampler]
trials = 4
[tolerances]
relative = 1e-6
"""


def test_extrapolate_writes_reports(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(CONFIG)
    code, out, _ = run(capsys, "extrapolate", "--config", cfg, "--json", tmp_path / "r.json",
                       "--csv", tmp_path / "r.csv")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "pass"
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["report"]["trials"] == 4
    assert len((tmp_path / "r.csv").read_text().strip().splitlines()) == 5


@pytest.mark.parametrize("edit, key", [
    (("levels = 3", 'levels = "three"'), "space.levels"),
    (('name = "product2"', 'name = "nope"'), "operator.name"),
    (("trials = 4", "trials = -1"), "sampler.trials"),
    (('gamma = ["1/4", "1/4"]', 'gamma = ["1/4"]'), "exponents"),
])
def test_malformed_config_names_the_key(tmp_path, capsys, edit, key):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(CONFIG.replace(*edit))
    code, _, err = run(capsys, "extrapolate", "--config", cfg)
    assert code == EXIT_CONFIG
    assert f"config error at '{key}" in err


def test_transfer(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps([1.0, [0.0, 2.0], -0.5, 3.0]))
    code, out, _ = run(capsys, "transfer", "--H", "2", "--G", "4", "--phi", "2", "--p", "2", "--m", m)
    data = json.loads(out)
    assert code == EXIT_OK and data["verdict"] == "consistent"
    assert data["dual"]["matrix"] == [[1]]
    assert data["lhs"]["value"] == pytest.approx(1.0) and data["rhs"]["value"] == pytest.approx(3.0)
    code, _, err = run(capsys, "transfer", "--H", "2", "--G", "4", "--phi", "1", "--m", m)
    assert code == EXIT_CONFIG and "not a homomorphism" in err


def test_trace_has_no_missing_tests(capsys):
    rows = trace()
    assert missing_tests(rows) == []
    assert all(s.reason for s in STATEMENTS if not s.in_scope)
    code, out, _ = run(capsys, "trace", "--json")
    assert code == EXIT_OK
    assert {r["key"] for r in json.loads(out)} == {s.key for s in STATEMENTS}


def test_trace_test_ids_exist():
    import ast
    from pathlib import Path

    root = Path(__file__).resolve().parent
    for st in STATEMENTS:
        for test_id in st.tests:
            path, name = test_id.split("::")
            tree = ast.parse((root.parent / path).read_text())
            names = {n.name for n in ast.walk(tree) if isinstance(n, ast.FunctionDef)}
            assert name in names, test_id


def test_suite_subset(tmp_path, capsys):
    code, out, err = run(capsys, "suite", "--seed", "3", "--only", "2", "--timings", tmp_path / "t.json")
    assert code == EXIT_OK
    assert json.loads(out)["criteria"]["2"]["passed"]
    assert "[PASS] criterion 2" in err
    assert "2" in json.loads((tmp_path / "t.json").read_text())
