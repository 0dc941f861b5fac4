import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import cohsim
from cohsim.cli import build_input, fmt, main, parse_number, split_top_level
from cohsim.linalg import binary_entropy

SCHEMA = json.loads((Path(cohsim.__file__).parent / "schemas" / "profile.schema.json").read_text())


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def teleport_qc(tmp_path, capsys):
    path = tmp_path / "teleport.qc"
    assert main(["protocol", "teleport", "--emit", str(path)]) == 0
    capsys.readouterr()
    return path


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_teleport_csv(capsys, teleport_qc):
    code, out, err = run_cli(capsys, "run", str(teleport_qc), "--input", "zero")
    assert code == 0 and err == ""
    assert out.splitlines()[0] == "stage_index,label,total_coherence,is_post_measurement,q0,q1,q2"
    assert "\r" not in out
    table = rows(out)
    assert max(table, key=lambda r: float(r["total_coherence"]))["total_coherence"] == "2.000000000000"
    assert [r["is_post_measurement"] for r in table] == ["false"] * 5 + ["true", "false"]
    assert not any(v.startswith("-") for r in table for v in r.values())


def test_json_matches_schema_and_csv(capsys, teleport_qc, tmp_path):
    target = tmp_path / "p.json"
    args = ["run", str(teleport_qc), "--input", "bloch(1.1,0.3),zero,zero"]
    assert main(args + ["--output", str(target)]) == 0
    _, csv_out, _ = run_cli(capsys, *args)
    doc = json.loads(target.read_text())
    jsonschema.validate(doc, SCHEMA)
    for r, s in zip(rows(csv_out), doc["stages"]):
        assert fmt(s["total_coherence"]) == r["total_coherence"]
        assert [fmt(x) for x in s["per_qubit"]] == [r[f"q{k}"] for k in range(3)]
        assert s["label"] == r["label"]
    assert doc["peak"] == {"stage_index": 4, "bits": doc["stages"][4]["total_coherence"]}


def test_run_syntax_error_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.qc"
    bad.write_text("qubits 2\nh 0\nnope\ncnot 0 5\n")
    code, out, err = run_cli(capsys, "run", str(bad))
    assert code == 1 and out == ""
    assert f"{bad}:3:1: error" in err and f"{bad}:4:8: error" in err
    assert "Traceback" not in err


def test_run_bad_input_spec_and_missing_file(capsys, teleport_qc, tmp_path):
    assert run_cli(capsys, "run", str(teleport_qc), "--input", "zero,one")[0] == 1
    assert run_cli(capsys, "run", str(teleport_qc), "--input", "bloch(4,0)")[0] == 1
    assert run_cli(capsys, "run", str(tmp_path / "nope.qc"))[0] == 1


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["protocol", "nonsense"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["verify", "all", "--seed", "-3"])
    assert exc.value.code == 1


def test_protocol_w_emit_coherence(capsys):
    code, out, _ = run_cli(capsys, "protocol", "w", "--n", "8", "--emit-coherence")
    assert code == 0 and out == "3.000000000000\n"


def test_protocol_teleport_two_gadgets_peak(capsys):
    code, out, err = run_cli(capsys, "protocol", "teleport", "--n", "2", "--theta", "0", "--run")
    assert code == 0
    assert "peak 4.000000000000" in err
    assert max(float(r["total_coherence"]) for r in rows(out)) == 4.0


def test_protocol_swap_pre_measurement(capsys):
    code, out, _ = run_cli(capsys, "protocol", "swap", "--run")
    table = rows(out)
    pre = [r for r in table if r["label"] == "rotate_h"][0]
    assert code == 0 and pre["total_coherence"] == "3.000000000000"


def test_protocol_emit_round_trips_through_run(capsys, tmp_path):
    path = tmp_path / "sd.qc"
    assert main(["protocol", "superdense", "--bits", "10", "--emit", str(path)]) == 0
    capsys.readouterr()
    code, out, _ = run_cli(capsys, "run", str(path))
    assert code == 0 and rows(out)[-1]["label"] == "measure"


def test_protocol_errors(capsys):
    assert run_cli(capsys, "protocol", "w", "--n", "1", "--run")[0] == 1
    assert run_cli(capsys, "protocol", "teleport", "--werner", "1.5")[0] == 1
    assert run_cli(capsys, "protocol", "superdense", "--bits", "2")[0] == 1
    code, _, err = run_cli(capsys, "protocol", "repeater", "--links", "7", "--run")
    assert code == 2 and "simulation error" in err


def test_protocol_default_prints_circuit(capsys):
    code, out, _ = run_cli(capsys, "protocol", "ghz", "--n", "3")
    assert code == 0 and "qubits 3" in out and out.startswith("# ghz")


def test_sweep_angle_endpoints(capsys):
    code, out, _ = run_cli(capsys, "sweep", "angle", "--values", "0,pi/4,pi/2")
    assert code == 0
    assert [r["message_term"] for r in rows(out)] == ["0.000000000000", "1.000000000000", "0.000000000000"]


def test_sweep_angle_grid_parallel_ordered(capsys):
    code, out, _ = run_cli(capsys, "sweep", "angle", "--range", "0", "pi/2", "9", "--jobs", "4")
    assert code == 0
    table = rows(out)
    phis = [float(r["phi"]) for r in table]
    assert phis == sorted(phis) and len(phis) == 9
    for r in table:
        phi = float(r["phi"])
        assert abs(float(r["message_term"]) - binary_entropy(np.cos(phi) ** 2)) <= 1e-9


def test_sweep_size(capsys):
    code, out, _ = run_cli(capsys, "sweep", "size", "--range", "2", "10", "9")
    assert code == 0
    for r in rows(out):
        assert abs(float(r["w"]) - np.log2(int(r["n"]))) <= 1e-9
        assert r["ghz"] == "1.000000000000"


def test_sweep_werner_nonincreasing(capsys):
    code, out, _ = run_cli(capsys, "sweep", "werner", "--values", "1.0,0.8,0.6")
    peaks = [float(r["peak"]) for r in rows(out)]
    assert code == 0 and peaks == sorted(peaks, reverse=True)


def test_sweep_schedule_and_errors(capsys):
    code, out, _ = run_cli(capsys, "sweep", "schedule", "--values", "3,4", "--mode", "parallel", "--s", "2")
    assert code == 0
    for r in rows(out):
        assert float(r["peak"]) <= float(r["estimate"]) + 1e-9
    assert run_cli(capsys, "sweep", "size", "--values", "2.5")[0] == 1
    assert run_cli(capsys, "sweep", "angle", "--values", "2")[0] == 1
    assert run_cli(capsys, "sweep", "schedule", "--values", "8")[0] == 2


def test_verify_prints_seed_and_results(capsys, monkeypatch):
    monkeypatch.setenv("COHSIM_SEED", "7")
    code, out, _ = run_cli(capsys, "verify", "monotone")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# seed=7 suite=monotone"
    assert lines[1].startswith("PASS monotone.")
    monkeypatch.setenv("COHSIM_SEED", "seven")
    assert run_cli(capsys, "verify", "monotone")[0] == 1


@pytest.mark.parametrize("suite", ["scaling", "branching"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run_cli(capsys, "verify", suite, "--seed", "7")
    assert code == 0
    assert all(line.startswith(("#", "PASS")) for line in out.splitlines())


def test_helpers():
    assert parse_number("pi/2") == pytest.approx(np.pi / 2)
    assert parse_number("-3pi/4") == pytest.approx(-3 * np.pi / 4)
    assert parse_number("0.5*pi") == pytest.approx(np.pi / 2)
    for bad in ("abc", "inf", "pi/"):
        with pytest.raises(ValueError):
            parse_number(bad)
    assert split_top_level("zero,bloch(1,2),one") == ["zero", "bloch(1,2)", "one"]
    with pytest.raises(ValueError):
        split_top_level("bloch(1,2")
    assert build_input("plus", 3).qubit_count == 3
    assert fmt(-1e-15) == "0.000000000000"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cohsim", "protocol", "ghz", "--n", "5", "--emit-coherence"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "1.000000000000\n"
