import csv
import io
import json
import math
import subprocess
import sys

import pytest

from nonortho import __version__
from nonortho.cli import main, report_space
from nonortho.sampler import expected_runs
from nonortho.treesearch import complete_tree


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_search_report(capsys):
    code, out, _ = run(capsys, "search", "--bits", "0110", "--oracle", "reflection", "--seed", "7")
    assert code == 0
    rep = json.loads(out)
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert rep["queries"] == 1
    assert rep["target"] == "0110" and rep["n"] == 2 and rep["oracle_variant"] == "reflection"
    assert rep["schema"] == 1 and rep["seed"] == 7 and rep["version"] == __version__
    assert rep["config"]["bits"] == "0110"


def test_search_diagonal(capsys):
    code, out, _ = run(capsys, "search", "--bits", "111001", "--oracle", "diagonal")
    assert code == 0 and json.loads(out)["fidelity"] == pytest.approx(1.0, abs=1e-10)


def test_encode_report(capsys):
    code, out, _ = run(capsys, "encode", "--bits", "0000")
    rep = json.loads(out)
    amps = [(e["alpha"], e["p"], e["q"], e["re"]) for e in rep["codeword"]["amplitudes"]]
    r = 1 / math.sqrt(2)
    assert amps == [(0, 0, 0, pytest.approx(r)), (1, 0, 0, pytest.approx(r))]
    assert rep["space"] == {"strings": 16, "qubits_standard": 4, "qubits_nonorthogonal": 3, "dimension": 8}


def test_encode_pads_odd(capsys):
    _, out, _ = run(capsys, "encode", "--bits", "110")
    rep = json.loads(out)
    assert rep["bits"] == "0110" and rep["padded"] is True


def test_decode_from_file(tmp_path, capsys):
    _, out, _ = run(capsys, "encode", "--bits", "100111")
    path = tmp_path / "cw.json"
    path.write_text(out)
    code, out, _ = run(capsys, "decode", "--state", str(path))
    assert code == 0 and json.loads(out)["bits"] == "100111"


def test_sample_csv(capsys):
    code, out, _ = run(capsys, "sample", "--bits", "01101100", "--trials", "20", "--seed", "4", "--format", "csv")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 20
    assert list(rows[0]) == ["n", "seed", "runs", "completed", "conflict"]
    assert all(r["completed"] == "1" and r["conflict"] == "0" and r["n"] == "4" for r in rows)


def test_sample_json_decodes(capsys):
    _, out, _ = run(capsys, "sample", "--bits", "011011", "--trials", "5")
    assert {t["decoded"] for t in json.loads(out)["trials"]} == {"011011"}


def test_tree_file(tmp_path, capsys):
    path = tmp_path / "tree.json"
    path.write_text(json.dumps(complete_tree(2).to_json()))
    code, out, _ = run(capsys, "tree", "--tree", str(path), "--target", "20", "--seed", "1")
    rep = json.loads(out)
    assert code == 0
    assert rep["path"] == rep["classical_path"] == [[1, 1], [1, 1]]
    assert rep["classical_examined"] == 16 and rep["quantum_queries"] == 1


def test_tree_random(capsys):
    code, out, _ = run(capsys, "tree", "--n", "5", "--seed", "9")
    rep = json.loads(out)
    assert code == 0 and rep["depth"] == 5 and rep["path"] == rep["classical_path"]


def test_bench_coupon_mean(capsys):
    code, out, _ = run(capsys, "bench", "--mode", "coupon", "--n", "8", "--trials", "100000", "--seed", "1")
    (row,) = parse_csv(out)
    assert code == 0
    assert float(row["mean_runs"]) == pytest.approx(21.743, rel=0.02)
    assert float(row["expected_runs"]) == pytest.approx(expected_runs(8), abs=1e-6)
    assert row["completed"] == "100000" and row["conflicts"] == "0"


def test_bench_workers_do_not_change_results(capsys):
    _, one, _ = run(capsys, "bench", "--n", "3", "4", "--trials", "500", "--seed", "2")
    _, many, _ = run(capsys, "bench", "--n", "3", "4", "--trials", "500", "--seed", "2", "--workers", "3")
    assert parse_csv(one) == parse_csv(many)


def test_bench_tree(capsys):
    code, out, _ = run(capsys, "bench", "--mode", "tree", "--n", "3", "--trials", "25", "--seed", "5")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 25
    assert list(rows[0]) == ["depth", "classical_examined", "quantum_queries", "measurement_runs", "seed"]
    assert all(r["quantum_queries"] == "1" and int(r["classical_examined"]) <= 64 for r in rows)


def test_bench_standard(capsys):
    code, out, _ = run(capsys, "bench", "--mode", "standard", "--n", "1", "2", "--format", "json")
    rep = json.loads(out)
    rows = [dict(zip(rep["columns"], r)) for r in rep["rows"]]
    assert code == 0
    assert rows[1] == {"num_bits": 2, "N": 4, "M": 1, "k": 1, "success_probability": 1.0, "closed_form": 1.0}
    for r in rows:
        assert r["success_probability"] == pytest.approx(r["closed_form"], abs=1e-9)


def test_guard_violation(capsys):
    code, _, err = run(capsys, "bench", "--mode", "standard", "--n", "9")
    assert code == 3 and json.loads(err)["error"] == "GuardError"


def test_invalid_bits(capsys):
    code, _, err = run(capsys, "search", "--bits", "01x1")
    assert code == 2 and "invalid bit string" in json.loads(err)["message"]


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["search", "--oracle", "bogus"])
    assert exc.value.code == 2


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "encode", "--bits", "01", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 4 and json.loads(err)["exit_code"] == 4


def test_missing_input_file(capsys, tmp_path):
    code, _, _ = run(capsys, "decode", "--state", str(tmp_path / "none.json"))
    assert code == 4


def test_out_path(tmp_path, capsys):
    target = tmp_path / "r.json"
    assert run(capsys, "search", "--bits", "00", "--out", str(target))[1] == ""
    assert json.loads(target.read_text())["queries"] == 1


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("NONORTHO_SEED", "1234")
    _, out, _ = run(capsys, "search", "--bits", "0110")
    assert json.loads(out)["seed"] == 1234


def test_reproducible_bytes(capsys):
    argv = ["bench", "--mode", "tree", "--n", "4", "--trials", "10", "--seed", "3"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ["sample", "--bits", "0110", "--trials", "10", "--seed", "3"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


@pytest.mark.parametrize(
    "n, record",
    [
        (1, {"strings": 4, "qubits_standard": 2, "qubits_nonorthogonal": 2, "dimension": 4}),
        (2, {"strings": 16, "qubits_standard": 4, "qubits_nonorthogonal": 3, "dimension": 8}),
        (3, {"strings": 64, "qubits_standard": 6, "qubits_nonorthogonal": 4, "dimension": 12}),
        (8, {"strings": 65536, "qubits_standard": 16, "qubits_nonorthogonal": 5, "dimension": 32}),
    ],
)
def test_report_space(n, record):
    assert report_space(n) == record


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nonortho", "bench", "--mode", "space", "--n", "2"],
        capture_output=True, text=True, check=True,
    )
    assert parse_csv(proc.stdout) == [
        {"n": "2", "strings": "16", "qubits_standard": "4", "qubits_nonorthogonal": "3", "dimension": "8"}
    ]
