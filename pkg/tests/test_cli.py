import csv
import io
import json
import math

import pytest

from pbsim.cli import MAX_PHOTONS, fmt, main
from pbsim.circuit import builtin_circuit, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_json(capsys):
    code, out, _ = run(capsys, "simulate", "--photons", "4", "--dump-state", "--dump-unitary")
    assert code == 0
    d = json.loads(out)
    assert d["probability"] == pytest.approx(3 / 256, abs=1e-15)
    assert d["closed_form_probability"] == pytest.approx(3 / 256, abs=1e-15)
    assert d["state"]["photons"] == 4
    assert len(d["unitary"]["matrix"]) == 8


def test_simulate_circuit_matches_builtin(capsys, tmp_path):
    path = tmp_path / "merge4.txt"
    path.write_text(serialize(builtin_circuit("merge", 4)))
    code, out, _ = run(capsys, "simulate", "--circuit", str(path))
    assert code == 0
    assert json.loads(out)["probability"] == pytest.approx(3 / 256, abs=1e-15)


def test_circuit_parse_error_reported(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("modes 2\nbs 1 0 R=5/4\n")
    code, out, err = run(capsys, "simulate", "--circuit", str(path))
    assert code == 1 and out == ""
    assert f"{path}:2:8:" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "stats", "--circuit", "/nonexistent/c.txt")
    assert code == 1 and "cannot read" in err


def test_photon_cap(capsys):
    code, _, err = run(capsys, "simulate", "--photons", str(MAX_PHOTONS + 1))
    assert code == 1 and "--force" in err
    code, _, _ = run(capsys, "simulate", "--photons", "0")
    assert code == 1


def test_stats_circular(capsys):
    code, out, _ = run(capsys, "stats")
    assert code == 0
    r = rows(out)
    assert list(r[0]) == ["basis", "phi", "delta_n", "probability"]
    assert [float(x["probability"]) for x in r] == [0.5, 0, 0, 0, 0.5]
    assert all(x["phi"] == "" for x in r)


def test_stats_linear_and_error(capsys):
    code, out, _ = run(capsys, "stats", "--basis", "linear", "--phi", str(math.pi / 8))
    assert {int(x["delta_n"]): float(x["probability"]) for x in rows(out)}[0] == pytest.approx(0.75)
    code, out, _ = run(capsys, "stats", "--state", "error", "--basis", "linear", "--phi", "0")
    p = {int(x["delta_n"]): float(x["probability"]) for x in rows(out)}
    assert p[-2] == pytest.approx(0.75) and p[2] == pytest.approx(0.25) and p[0] == 0


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--phi-steps", "8")
    r = rows(out)
    assert code == 0 and len(r) == 8 * 5
    assert float(r[0]["phi"]) == 0.0
    code, _, _ = run(capsys, "sweep", "--phi-steps", "0")
    assert code == 1


def test_error_command(capsys):
    code, out, _ = run(capsys, "error", "--epsilon", "0.2")
    r = rows(out)
    assert code == 0
    assert list(r[0]) == ["delta_n", "weight", "probability"]
    assert math.fsum(float(x["weight"]) for x in r) == pytest.approx(0.0109375, abs=1e-15)
    assert math.fsum(float(x["probability"]) for x in r) == pytest.approx(1.0)
    assert run(capsys, "error", "--epsilon", "2")[0] == 1
    assert run(capsys, "error", "--bad-port", "4")[0] == 1


def test_ghz_command(capsys):
    code, out, _ = run(capsys, "ghz", "--epsilon", "1", "--curve-steps", "4")
    r = rows(out)
    assert code == 0 and len(r) == 6
    assert r[0]["kind"] == "point"
    assert float(r[0]["fraction"]) == pytest.approx(3 / 8)
    assert r[0]["witness"] == "fail"
    assert r[1]["witness"] == "pass" and float(r[1]["fraction"]) == 1.0
    assert float(r[0]["closed_form"]) == pytest.approx(3 / 8)


def test_circuit_command(capsys):
    code, out, _ = run(capsys, "circuit", "merge", "-n", "4")
    assert code == 0 and out == serialize(builtin_circuit("merge", 4))


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv("PBSIM_PRECISION", "4")
    assert fmt(1 / 3) == "0.3333"
    assert fmt(-1e-17) == "0"
    monkeypatch.setenv("PBSIM_PRECISION", "40")
    code, _, err = run(capsys, "stats")
    assert code == 1 and "PBSIM_PRECISION" in err


def test_validate_reports_each_criterion(capsys):
    code, out, _ = run(capsys, "validate")
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) == 9
    assert code == (0 if all(l.startswith("PASS") for l in lines) else 1)
