import json

import numpy as np
import pytest

from phaseconj.channel import KrausChannel, channel_from_json
from phaseconj.cli import main
from phaseconj.dilation import dilation_from_json
from phaseconj.nsb import canonical


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report_of(stdout: str) -> dict:
    return json.loads(stdout)


def test_table_csv(tmp_path, capsys):
    out = tmp_path / "table.csv"
    code, stdout, _ = run(capsys, "table", "--dmax", "3", "--out", str(out))
    assert code == 0
    rep = report_of(stdout)
    assert rep["command"] == "table"
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "d,opt,universal,phase_est"
    d2 = lines[1].split(",")
    d3 = lines[2].split(",")
    assert float(d2[1]) == 1.0 and float(d2[2]) == 2 / 3 and float(d2[3]) == 3 / 4
    assert float(d3[1]) == 2 / 3 and float(d3[2]) == 0.5 and float(d3[3]) == 5 / 9


def test_table_json_single_row(tmp_path, capsys):
    out = tmp_path / "table.json"
    code, _, _ = run(capsys, "table", "--dmax", "2", "--format", "json", "--out", str(out))
    assert code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 1 and rows[0]["d"] == 2


def test_table_ordering_checks(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, stdout, _ = run(capsys, "table", "--dmax", "8", "--out", str(out))
    assert code == 0
    assert all(c["pass"] for c in report_of(stdout)["checks"])


def test_table_determinism(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, first, _ = run(capsys, "table", "--dmax", "5", "--out", str(out))
    bytes_first = out.read_bytes()
    code, second, _ = run(capsys, "table", "--dmax", "5", "--out", str(out))
    assert first == second
    assert out.read_bytes() == bytes_first


def test_build_canonical(tmp_path, capsys):
    out = tmp_path / "chan.json"
    code, stdout, _ = run(capsys, "build", "--d", "3", "--canonical", "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    ch = channel_from_json(payload)
    assert isinstance(ch, KrausChannel)
    assert len(ch.operators) == 3
    assert "choi" in payload


def test_build_family(tmp_path, capsys):
    out = tmp_path / "chan.json"
    code, stdout, _ = run(
        capsys, "build", "--d", "4", "--p1", "0.2", "--p2", "0.3", "--out", str(out)
    )
    assert code == 0
    assert all(c["pass"] for c in report_of(stdout)["checks"])


def test_build_bad_nsb_file(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0.4,0.5\n0.4,0,0.5\n0.5,0.5,0\n")
    out = tmp_path / "chan.json"
    code, stdout, stderr = run(
        capsys, "build", "--d", "3", "--nsb", str(bad), "--out", str(out)
    )
    assert code == 2
    assert "row 0" in stderr
    assert not out.exists()


def test_build_conflicting_sources(tmp_path, capsys):
    code, _, stderr = run(
        capsys, "build", "--d", "3", "--canonical", "--p1", "0.2", "--p2", "0.3",
        "--out", str(tmp_path / "x.json"),
    )
    assert code == 2


def test_verify_d5(capsys):
    code, stdout, _ = run(capsys, "verify", "--d", "5", "--seeds", "20")
    assert code == 0
    rep = report_of(stdout)
    assert abs(rep["parameters"]["fidelity"] - 0.4) <= 1e-12
    names = [c["name"] for c in rep["checks"]]
    assert names == sorted(names)
    assert all(c["pass"] for c in rep["checks"])


def test_verify_d2_reports_unit_fidelity(capsys):
    code, stdout, _ = run(capsys, "verify", "--d", "2")
    assert code == 0
    rep = report_of(stdout)
    assert abs(rep["parameters"]["fidelity"] - 1.0) <= 1e-12
    assert rep["parameters"]["dilation_ancilla_dim"] == 1


def test_verify_even_d_runs_dilation_checks(capsys):
    code, stdout, _ = run(capsys, "verify", "--d", "4", "--seeds", "10")
    assert code == 0
    names = [c["name"] for c in report_of(stdout)["checks"]]
    assert "dilation_matching" in names and "dilation_controlled" in names


def test_verify_rejects_asymmetric_nsb(tmp_path, capsys):
    bad = tmp_path / "asym.csv"
    m = canonical(4).entries.copy()
    m[0, 1] += 0.05
    np.savetxt(bad, m, delimiter=",")
    code, stdout, stderr = run(capsys, "verify", "--d", "4", "--nsb", str(bad))
    assert code == 2
    assert "asymmetric" in stderr
    assert report_of(stdout)["checks"] == []


def test_verify_determinism(capsys):
    code, first, _ = run(capsys, "verify", "--d", "3", "--seeds", "5")
    code, second, _ = run(capsys, "verify", "--d", "3", "--seeds", "5")
    assert first == second


def test_oracle_d3(capsys):
    code, stdout, _ = run(capsys, "oracle", "--d", "3")
    assert code == 0
    rep = report_of(stdout)
    assert abs(rep["parameters"]["value"] - 2 / 3) <= 1e-6
    assert max(rep["parameters"]["singleton_weights"]) <= 1e-5


def test_oracle_d2(capsys):
    code, stdout, _ = run(capsys, "oracle", "--d", "2")
    assert code == 0
    assert abs(report_of(stdout)["parameters"]["value"] - 1.0) <= 1e-6


def test_dilation_matching(tmp_path, capsys):
    out = tmp_path / "dil.json"
    code, stdout, _ = run(
        capsys, "dilation", "--d", "4", "--matching", "01,23", "--out", str(out)
    )
    assert code == 0
    rep = report_of(stdout)
    assert rep["parameters"]["ancilla_dim"] == 2
    spec = dilation_from_json(json.loads(out.read_text()))
    assert spec.d == 4 and spec.ancilla_dim == 2


def test_dilation_controlled(tmp_path, capsys):
    out = tmp_path / "dil.json"
    code, stdout, _ = run(
        capsys, "dilation", "--d", "4", "--control", "--p", "0.2,0.3,0.5",
        "--out", str(out),
    )
    assert code == 0
    rep = report_of(stdout)
    assert rep["parameters"]["control_dim"] == 3
    assert all(c["pass"] for c in rep["checks"])


def test_dilation_odd_d_generic(tmp_path, capsys):
    out = tmp_path / "dil.json"
    code, stdout, stderr = run(capsys, "dilation", "--d", "3", "--out", str(out))
    assert code == 0
    assert "warning" in stderr and "not minimal" in stderr
    rep = report_of(stdout)
    assert rep["parameters"]["route"] == "generic"
    assert rep["parameters"]["ancilla_dim"] == 3
    assert rep["parameters"]["minimal"] is False


def test_dilation_bad_weights(tmp_path, capsys):
    code, _, _ = run(
        capsys, "dilation", "--d", "4", "--control", "--p", "0.2,0.3",
        "--out", str(tmp_path / "x.json"),
    )
    assert code == 2


def test_formula_check_d4(capsys):
    code, stdout, _ = run(capsys, "formula-check", "--d", "4")
    assert code == 0
    rep = report_of(stdout)
    assert rep["parameters"]["unitary_shifts"] == [1, 3]
    assert rep["parameters"]["nonunitary_shifts"] == [2]


def test_formula_check_d2_and_d6(capsys):
    code, stdout, _ = run(capsys, "formula-check", "--d", "2")
    assert code == 0
    assert report_of(stdout)["parameters"]["unitary_shifts"] == [1]

    code, stdout, _ = run(capsys, "formula-check", "--d", "6")
    assert code == 0
    rep = report_of(stdout)
    assert rep["parameters"]["unitary_shifts"] == [1, 3, 5]
    assert rep["parameters"]["nonunitary_shifts"] == [2, 4]
    for entry in rep["parameters"]["results"]:
        if not entry["unitary"]:
            assert entry["deviation"] > 1e-10


def test_formula_check_rejects_odd(capsys):
    code, _, _ = run(capsys, "formula-check", "--d", "5")
    assert code == 2


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["table", "--dmax"])  # missing value
    assert exc.value.code == 2
