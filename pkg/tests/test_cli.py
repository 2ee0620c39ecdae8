import csv
import io
import json

import numpy as np
import pytest

from multicat.cli import main, parse_complex
from multicat.codes import covariance_check, load_code


@pytest.fixture(scope="module")
def code_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "code.json"
    assert main(["build", "--group", "pauli8", "--alpha", "1.5", "--beta", "0,1.5", "--out", str(path)]) == 0
    return path


def _json(text):
    return json.loads(text)


def test_parse_complex():
    assert parse_complex("1.5") == 1.5
    assert parse_complex("0,2") == 2j


def test_check_design(capsys):
    assert main(["check-design", "--group", "clifford96"]) == 0
    out = _json(capsys.readouterr().out)
    assert out["is_1_design"] and out["order"] == 192


def test_build_roundtrip(code_file):
    code = load_code(code_file)
    assert covariance_check(code) < 1e-8
    assert code.beta == pytest.approx(1.5j)


def test_fidelity_zero_loss(code_file, capsys):
    assert main(["fidelity", "--code", str(code_file), "--gamma", "0"]) == 0
    out = _json(capsys.readouterr().out)
    assert out["infidelity_opt"] < 1e-10 and out["infidelity_transpose"] < 1e-10


def test_fidelity_sdp_only(code_file, capsys):
    assert main(["fidelity", "--code", str(code_file), "--gamma", "0.01", "--method", "sdp"]) == 0
    out = _json(capsys.readouterr().out)
    assert "F_transpose" not in out and out["duality_gap"] < 1e-8


def test_kl_csv(code_file, capsys, tmp_path):
    summ = tmp_path / "s.json"
    assert main(["kl", "--code", str(code_file), "--gamma", "0.01", "--pmax", "8", "--summary", str(summ)]) == 0
    text = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["p1", "q1", "p2", "q2", "entry_re", "entry_im", "k", "l"]
    assert len(rows) == 1 + 45 * 45 * 4
    s = _json(summ.read_text())
    assert s["tail_bound"] < 1e-8 and s["score"] >= s["off_diagonal"]


def test_kl_summary_on_stderr(code_file, capsys):
    assert main(["kl", "--code", str(code_file), "--gamma", "0.01", "--pmax", "8"]) == 0
    err = _json(capsys.readouterr().err)
    assert err["summary"]["pmax"] == 8


def test_usage_error(capsys):
    assert main(["build", "--group", "pauli8"]) == 2
    err = _json(capsys.readouterr().err)
    assert err["error"] == "usage"


def test_input_error(capsys, tmp_path):
    assert main(["fidelity", "--code", str(tmp_path / "missing.json"), "--gamma", "0.01"]) == 2
    assert _json(capsys.readouterr().err)["error"] == "input"


def test_numerical_failure(code_file, capsys):
    # P_max = 0 leaves a loss tail far above the completeness threshold
    assert main(["kl", "--code", str(code_file), "--gamma", "0.2", "--pmax", "0"]) == 3
    err = _json(capsys.readouterr().err)
    assert err["error"] == "numerical" and err["type"] == "TailTooLarge"


def test_sweep(tmp_path, capsys):
    out = tmp_path / "a.csv"
    args = ["sweep", "--group", "pauli8", "--alpha-start", "0.5", "--alpha-stop", "1.0", "--alpha-steps", "2",
            "--theta", str(np.pi / 2), "--gamma", "0.01", "--jobs", "1", "--out"]
    assert main(args + [str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,theta,gamma,group,variant,infidelity_opt,infidelity_transpose,gap,support_dim,cutoff,pmax"
    assert len(lines) == 3
    out2 = tmp_path / "b.csv"
    assert main(args + [str(out2)]) == 0
    assert out.read_text() == out2.read_text()


def test_gates(code_file, capsys):
    assert main(["gates", "--code", str(code_file)]) == 0
    res = _json(capsys.readouterr().out)["results"]
    assert all(r["pass"] for r in res)


def test_transversal(capsys):
    assert main(["transversal", "--group", "clifford96", "--copies", "9"]) == 0
    out = _json(capsys.readouterr().out)
    assert out["norm"] > 1 and out["covariance_residual"] < 1e-8
    assert main(["transversal", "--group", "clifford96", "--copies", "3"]) == 0
    out = _json(capsys.readouterr().out)
    assert out["norm"] < 1e-12 and out["idempotence_residual"] is None


def test_haar(capsys):
    assert main(["haar-test", "--photons", "1,0", "--samples", "20000", "--seed", "1"]) == 0
    out = _json(capsys.readouterr().out)
    assert out["exact_norm"] == 1 and out["z_score"] < 4
