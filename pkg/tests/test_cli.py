import json

import pytest

from schwinger_be.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_defaults_reproduce_grid(capsys):
    code, out, _ = run(capsys, "estimate")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    assert lines[0].split(",")[0] == "n_sites"
    assert len(lines) == 16  # header + 15 rows
    first = lines[1].split(",")
    assert first[0] == "16" and float(first[3]) == pytest.approx(9.11e9,
                                                                 rel=0.01)


def test_estimate_single_cell_json(capsys):
    code, out, _ = run(capsys, "estimate", "--N", "16", "--wt", "1",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert len(doc["rows"]) == 1
    assert float(doc["rows"][0]["t_count"]) == pytest.approx(9.11e9, rel=0.01)


def test_estimate_rejects_bad_grid(capsys):
    code, _, err = run(capsys, "estimate", "--N", "9")
    assert code == 2 and "error" in err


def test_estimate_empty_grid_usage_error(capsys):
    code, _, _ = run(capsys, "estimate", "--N")
    assert code == 2


def test_verify_block_pass(capsys):
    code, out, _ = run(capsys, "verify", "--N", "8", "--epsilon", "1e-2")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and doc["measured_error"] <= 1e-2


def test_verify_rejects_odd_n(capsys):
    code, _, err = run(capsys, "verify", "--N", "9")
    assert code == 2


def test_verify_arithmetic_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "arithmetic",
                       "--bits", "6")
    assert code == 0
    assert json.loads(out)["passed"]


def test_verify_subroutine_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "subroutines")
    assert code == 0
    assert json.loads(out)["passed"]


def test_dynamics_series(capsys):
    code, out, _ = run(capsys, "dynamics", "--N", "4", "--t-max", "2.0",
                       "--steps", "5")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    header, first = lines[0].split(","), lines[1].split(",")
    assert header == ["t", "re_g", "im_g", "abs_g", "nu"]
    assert float(first[1]) == pytest.approx(1.0)
    assert float(first[4]) == pytest.approx(0.0, abs=1e-10)
    for ln in lines[1:]:
        assert float(ln.split(",")[3]) <= 1 + 1e-9


def test_dynamics_dense_limit(capsys):
    code, _, err = run(capsys, "dynamics", "--N", "16")
    assert code == 2


def test_ae_records_and_determinism(capsys):
    args = ("ae", "--omega", "0.5", "--runs", "5", "--seed", "7",
            "--epsilon", "0.02")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    code, out2, _ = run(capsys, *args)
    assert out1 == out2
    lines = out1.strip().splitlines()
    recs = [json.loads(ln) for ln in lines]
    assert sum("summary" in r for r in recs) == 1
    data = [r for r in recs if "summary" not in r]
    assert len(data) == 5
    assert all(r["q_psi"] == r["q_pi"] for r in data)


def test_ae_hoeffding_flag(capsys):
    code, out, _ = run(capsys, "ae", "--hoeffding", "--epsilon", "0.005",
                       "--delta", "0.05")
    assert code == 0
    doc = json.loads(out)
    assert doc["hoeffding_queries"] == 73778
    assert doc["chebyshev_worst_case"] == 2964


def test_ae_rejects_bad_omega(capsys):
    code, _, _ = run(capsys, "ae", "--omega", "1.5", "--runs", "1")
    assert code == 2


def test_physical_headline(capsys):
    code, out, _ = run(capsys, "physical", "--N", "64", "--wt", "10",
                       "--p-phys", "1e-3", "1e-4")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    rows = [dict(zip(lines[0].split(","), ln.split(","))) for ln in lines[1:]]
    assert int(rows[0]["physical_qubits"]) == pytest.approx(9e5, rel=0.2)
    assert int(rows[1]["physical_qubits"]) == pytest.approx(2e5, rel=0.2)


def test_physical_rejects_threshold(capsys):
    code, _, _ = run(capsys, "physical", "--p-phys", "0.01")
    assert code == 2


def test_output_file(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "estimate", "--N", "16", "--wt", "1",
                       "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("# schema_version")
